#include "uecsp/linear_solver.hpp"

#include <cstring>
#include <stdexcept>
#include <vector>

#include "uecsp/modular.hpp"

namespace uecsp {

namespace {

SatVerdict solve_gf2(const Formula& f) {
    const std::uint32_t n = f.num_vars();
    const std::size_t words = (n + 63) / 64;

    std::vector<std::vector<std::uint64_t>> rows;
    std::vector<std::uint8_t> rhs;
    rows.reserve(f.alive_clauses());
    for (const Clause& c : f.clauses()) {
        if (!c.alive) continue;
        if (c.terms.empty()) return {false, std::nullopt, 0};  // contradiction marker
        std::vector<std::uint64_t> row(words, 0);
        for (const Term& t : c.terms) row[t.var >> 6] ^= 1ULL << (t.var & 63);
        rows.push_back(std::move(row));
        rhs.push_back(static_cast<std::uint8_t>(c.rhs & 1));
    }

    const std::size_t m = rows.size();
    std::vector<std::uint32_t> pivot_col;  // per eliminated row
    std::size_t r = 0;
    for (std::uint32_t col = 0; col < n && r < m; ++col) {
        std::size_t sel = m;
        for (std::size_t i = r; i < m; ++i) {
            if (rows[i][col >> 6] >> (col & 63) & 1) { sel = i; break; }
        }
        if (sel == m) continue;
        std::swap(rows[sel], rows[r]);
        std::swap(rhs[sel], rhs[r]);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r) continue;
            if (rows[i][col >> 6] >> (col & 63) & 1) {
                for (std::size_t w = 0; w < words; ++w) rows[i][w] ^= rows[r][w];
                rhs[i] ^= rhs[r];
            }
        }
        pivot_col.push_back(col);
        ++r;
    }
    for (std::size_t i = r; i < m; ++i)
        if (rhs[i]) return {false, std::nullopt, r};  // 0 = 1 row

    Assignment a(n);
    for (std::uint32_t v = 0; v < n; ++v)
        a.value[v] = f.assigned(v) ? f.value(v) : 0;
    for (std::size_t i = 0; i < r; ++i) a.value[pivot_col[i]] = rhs[i];
    return {true, std::move(a), r};
}

SatVerdict solve_prime(const Formula& f) {
    const std::uint32_t n = f.num_vars();
    const std::uint32_t d = f.domain();

    std::vector<std::vector<std::uint32_t>> rows;  // n coefficients + rhs
    rows.reserve(f.alive_clauses());
    for (const Clause& c : f.clauses()) {
        if (!c.alive) continue;
        if (c.terms.empty()) return {false, std::nullopt, 0};
        std::vector<std::uint32_t> row(n + 1, 0);
        for (const Term& t : c.terms) row[t.var] = t.coef % d;
        row[n] = c.rhs;
        rows.push_back(std::move(row));
    }

    const std::size_t m = rows.size();
    std::vector<std::uint32_t> pivot_col;
    std::size_t r = 0;
    for (std::uint32_t col = 0; col < n && r < m; ++col) {
        std::size_t sel = m;
        for (std::size_t i = r; i < m; ++i)
            if (rows[i][col] != 0) { sel = i; break; }
        if (sel == m) continue;
        std::swap(rows[sel], rows[r]);
        std::uint32_t inv = mod_inverse(rows[r][col], d);
        for (std::uint32_t j = col; j <= n; ++j) rows[r][j] = mod_mul(rows[r][j], inv, d);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || rows[i][col] == 0) continue;
            std::uint32_t factor = rows[i][col];
            for (std::uint32_t j = col; j <= n; ++j)
                rows[i][j] = mod_sub(rows[i][j], mod_mul(factor, rows[r][j], d), d);
        }
        pivot_col.push_back(col);
        ++r;
    }
    for (std::size_t i = r; i < m; ++i)
        if (rows[i][n] != 0) return {false, std::nullopt, r};

    Assignment a(n);
    for (std::uint32_t v = 0; v < n; ++v)
        a.value[v] = f.assigned(v) ? f.value(v) : 0;
    for (std::size_t i = 0; i < r; ++i)
        a.value[pivot_col[i]] = static_cast<std::int32_t>(rows[i][n]);
    return {true, std::move(a), r};
}

}  // namespace

SatVerdict gaussian_solve(const Formula& f) {
    if (f.domain() == 2) return solve_gf2(f);
    if (!is_prime(f.domain()))
        throw std::domain_error("gaussian_solve: domain must be prime");
    return solve_prime(f);
}

}  // namespace uecsp
