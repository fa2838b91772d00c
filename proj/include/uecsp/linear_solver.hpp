#pragma once

#include <optional>

#include "uecsp/formula.hpp"

namespace uecsp {

struct SatVerdict {
    bool satisfiable = false;
    std::optional<Assignment> witness;  // full assignment over all variables when satisfiable
    std::uint64_t rank = 0;
};

// Exact satisfiability of the alive clause system by Gaussian elimination mod d.
// d == 2 uses packed 64-bit rows; odd prime d uses dense rows with modular
// inverses. Non-prime d is rejected (std::domain_error). Free variables are set
// to 0 in the witness; already-assigned variables keep their values.
SatVerdict gaussian_solve(const Formula& f);

}  // namespace uecsp
