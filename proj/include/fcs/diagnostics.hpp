#pragma once

#include "fcs/core.hpp"
#include "fcs/entanglement.hpp"
#include "fcs/parametrization.hpp"

#include <optional>

namespace fcs {

/// Everything reported about the chain generated by one parameter vector.
struct StateDiagnostics {
    double concurrence = 0.0;
    double assistance = 0.0;
    AbcElements elements;
    double purity12 = 0.0;
    double purity1 = 0.0;
    double purity123 = 0.0;
    double bloch_length_sq = 0.0;
    std::optional<double> ellipse_residual; ///< b = 2 only
    double next_nearest_concurrence = 0.0;
    double next_nearest_assistance = 0.0;
    double unitality_residual = 0.0;
    double fixed_point_residual = 0.0;
    int nullspace_rank = 0;
    CMatrix rho_b;
    CMatrix rho12;
};

/// Nearest-neighbour concurrence of the chain generated by p. Throws the
/// solver's Error on an unusable parameter point.
inline double objective(const ParameterVector &p) {
    const KrausPair pair = build_pair(p);
    const AuxiliaryState aux = solve_invariant_state(pair);
    return concurrence(reduced_density(pair, aux, 2).rho);
}

/// objective() with solve failures mapped to nullopt.
inline std::optional<double> try_objective(const ParameterVector &p) {
    try {
        return objective(p);
    } catch (const Error &e) {
        if (is_solve_failure(e.kind())) return std::nullopt;
        throw;
    }
}

inline StateDiagnostics diagnose(const ParameterVector &p) {
    const KrausPair pair = build_pair(p);
    const AuxiliaryState aux = solve_invariant_state(pair);
    const ReducedState rho123 = reduced_density(pair, aux, 3);
    const ReducedState rho12 = reduced_density(pair, aux, 2);
    const ReducedState rho1 = reduced_density(pair, aux, 1);
    const ReducedState rho13 = next_nearest(pair, aux);

    StateDiagnostics d;
    const auto spectrum = concurrence_spectrum(rho12.rho);
    d.concurrence = spectrum.concurrence;
    d.assistance = spectrum.assistance;
    d.elements = abc_elements(rho12.rho);
    d.purity12 = purity(rho12.rho);
    d.purity1 = purity(rho1.rho);
    d.purity123 = purity(rho123.rho);
    d.bloch_length_sq = bloch_length_sq(aux.rho);
    if (p.b == 2) d.ellipse_residual = ellipse_residual(bloch_decompose(aux.rho, 2));
    const auto nn = concurrence_spectrum(rho13.rho);
    d.next_nearest_concurrence = nn.concurrence;
    d.next_nearest_assistance = nn.assistance;
    d.unitality_residual = check_unitality(pair);
    d.fixed_point_residual = fixed_point_residual(pair, aux.rho);
    d.nullspace_rank = aux.rank;
    d.rho_b = aux.rho;
    d.rho12 = rho12.rho;
    return d;
}

} // namespace fcs
