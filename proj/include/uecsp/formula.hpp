#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace uecsp {

// One summand a*x of a generalized linear equation sum_i a_i x_i = rhs (mod d).
struct Term {
    std::uint32_t var;
    std::uint32_t coef;  // unit mod d, in [1, d)
};

// Clause invariants: distinct variables, unit coefficients. A clause that reaches
// length 0 with rhs == 0 is satisfied and dies; with rhs != 0 it stays alive as a
// contradiction marker.
struct Clause {
    std::vector<Term> terms;
    std::uint32_t rhs = 0;
    bool alive = true;

    std::size_t len() const { return terms.size(); }
};

// Snapshot of per-length alive-clause tallies (index j = 1..k).
struct ClauseCounts {
    std::vector<std::uint64_t> by_len;  // by_len[j]; by_len[0] unused
    std::uint64_t alive = 0;            // sum over j >= 1
    std::uint32_t num_vars = 0;

    double density(std::size_t j) const {
        return static_cast<double>(by_len.at(j)) / static_cast<double>(num_vars);
    }
    double alpha() const {
        return static_cast<double>(alive) / static_cast<double>(num_vars);
    }
};

// Histogram of occurrence counts over *unassigned* variables.
struct DegreeProfile {
    std::vector<std::uint64_t> by_degree;  // by_degree[l] = #vars with l occurrences
    std::uint64_t unassigned = 0;

    double mean() const;
};

// Values indexed by variable; -1 means unassigned.
struct Assignment {
    std::vector<std::int32_t> value;

    explicit Assignment(std::size_t n = 0) : value(n, -1) {}
    bool assigned(std::uint32_t v) const { return value[v] >= 0; }
    std::size_t count_assigned() const;
};

// Emitted by reduce_by_assignment: every clause-length change plus derived flags.
struct ReductionReport {
    struct Event {
        std::uint32_t clause;
        std::uint32_t new_len;  // 0 = satisfied or contradiction
    };
    std::vector<Event> events;
    std::vector<std::uint32_t> new_units;  // clauses that reached length 1
    std::uint32_t satisfied = 0;
    bool contradiction = false;
};

class Formula {
public:
    Formula() = default;

    // Poissonian random instance: M = round(alpha*N) clauses, each with k distinct
    // uniform variables, unit coefficients and uniform rhs. Equal seeds give
    // bit-identical formulas.
    static Formula random(std::uint32_t num_vars, std::uint32_t arity, double alpha,
                          std::uint32_t domain, std::uint64_t seed);

    static Formula parse(std::istream& in);
    static Formula parse_text(const std::string& text);
    void serialize(std::ostream& out) const;
    std::string to_text() const;

    std::uint32_t domain() const { return domain_; }
    std::uint32_t num_vars() const { return num_vars_; }
    std::uint32_t arity() const { return arity_; }

    const std::vector<Clause>& clauses() const { return clauses_; }
    const Clause& clause(std::uint32_t cid) const { return clauses_[cid]; }
    const std::vector<std::uint32_t>& occurrences(std::uint32_t var) const { return occ_[var]; }

    std::uint64_t alive_clauses() const { return alive_count_; }
    bool has_contradiction() const { return contradiction_; }

    std::uint32_t degree(std::uint32_t var) const { return degree_[var]; }
    bool assigned(std::uint32_t var) const { return value_[var] >= 0; }
    std::int32_t value(std::uint32_t var) const { return value_[var]; }
    std::uint64_t num_assigned() const { return assigned_count_; }
    std::uint64_t num_unassigned() const { return num_vars_ - assigned_count_; }

    ClauseCounts counts() const;
    DegreeProfile degree_profile() const;

    // sum_l l*N_l == sum_j j*C_j (both count alive occurrences)
    bool handshake_ok() const;

    // Sets var := val and folds it out of every alive clause containing it.
    ReductionReport reduce_by_assignment(std::uint32_t var, std::uint32_t val);

    // Deletes an alive clause outright (leaf-removal primitive); terms are kept so
    // the clause can be replayed later. Returns (var, new_degree) for its members.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> remove_clause(std::uint32_t cid);

    // Full assignment extending the internal partial one; unassigned slots get -1.
    Assignment current_assignment() const;

private:
    void add_clause_indexed(Clause c);
    void validate_params() const;

    std::uint32_t domain_ = 2;
    std::uint32_t num_vars_ = 0;
    std::uint32_t arity_ = 0;
    std::vector<Clause> clauses_;
    std::vector<std::vector<std::uint32_t>> occ_;  // may hold ids of dead clauses (lazily skipped)
    std::vector<std::uint32_t> degree_;            // alive occurrences per var
    std::vector<std::int32_t> value_;
    std::vector<std::uint64_t> len_count_;   // index 0..arity; [0] counts contradiction markers
    std::vector<std::uint64_t> degree_hist_; // over unassigned vars
    std::uint64_t alive_count_ = 0;          // alive clauses of length >= 1
    std::uint64_t assigned_count_ = 0;
    bool contradiction_ = false;
};

// True iff every alive clause is satisfied. Throws std::invalid_argument if a
// variable of an alive clause is unassigned in `a`.
bool check_solution(const Formula& f, const Assignment& a);

}  // namespace uecsp
