#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uecsp/formula.hpp"

namespace uecsp {

struct PeelStep {
    std::uint32_t clause;
    std::uint32_t pivot;  // the variable whose single occurrence triggered removal
};

struct CoreReport {
    bool empty = true;
    std::uint64_t core_vars = 0;                       // vars with >= 1 (hence >= 2) alive occurrences
    std::vector<std::uint64_t> core_clauses_by_len;    // index j = 0..k
    std::uint64_t backbone_vars = 0;                   // implication closure of the core vars
    double backbone_fraction = 0.0;                    // backbone_vars / N; largest root of 1-b = e^{-G'(b)}
    std::vector<PeelStep> peel_order;                  // forward removal order
};

// Iteratively removes a uniformly random clause containing a single-occurrence
// variable until none remains; mutates f into its 2-core. Throws
// std::invalid_argument if f has a unit clause.
CoreReport leaf_remove(Formula& f, std::uint64_t seed);

// Extends a satisfying assignment of the core to the whole formula by replaying
// the peel order backwards; non-core unconstrained variables are drawn uniformly
// from `seed`. Throws std::invalid_argument if the witness does not satisfy the
// core (or leaves core variables unassigned).
Assignment reconstruct_solution(const Assignment& core_witness, const CoreReport& report,
                                const Formula& peeled, std::uint64_t seed);

// {"empty":…, "core_vars":…, "core_clauses_by_len":[…], "backbone_vars":…, "backbone_fraction":…}
std::string core_report_json(const CoreReport& report);

}  // namespace uecsp
