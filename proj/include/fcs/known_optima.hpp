#pragma once

// Reference optima of nearest-neighbour concurrence and the conjectured bound.

#include "fcs/parametrization.hpp"

#include <cmath>
#include <optional>

namespace fcs::known {

/// Conjectured maximal nearest-neighbour concurrence of translation-invariant chains.
inline constexpr double kWoottersBound = 0.434467;

/// Closed-form b = 2 optimum, sqrt(2) - 1.
inline const double kOptimumB2 = std::sqrt(2.0) - 1.0;

struct ReferenceOptimum {
    ParameterVector params;
    double concurrence;           ///< reference optimum value
    double relative_difference;   ///< percent below kWoottersBound
};

/// Reference parameter sets for b = 2..7; nullopt otherwise.
inline std::optional<ReferenceOptimum> reference_optimum(int b) {
    ParameterVector p;
    p.b = b;
    switch (b) {
        case 2:
            p.alpha = {0.427079};
            p.phi = {0.571859};
            return ReferenceOptimum{p, 0.41421, 4.66};
        case 3:
            p.alpha = {3.27378};
            p.phi = {3.14062, 0.56623, 4.17472};
            return ReferenceOptimum{p, 0.41825, 3.73};
        case 4:
            p.alpha = {0.252679, 2.888910};
            p.phi = {0.062823, 5.504548, 5.892460, 0.805037, 0.272233, 0.741237};
            return ReferenceOptimum{p, 0.43200, 0.57};
        case 5:
            p.alpha = {6.345324, 0.269592};
            p.phi = {6.22996, 2.351162, 2.713085, 0.047930, 5.137121,
                     0.417055, 5.628356, 1.759880, 5.728579, 1.193187};
            return ReferenceOptimum{p, 0.43247, 0.46};
        case 6:
            p.alpha = {3.84312, 0.10177, 3.10541};
            p.phi = {5.88873, 6.10731, 1.48352, 4.71882, 1.38430, 0.79196, 4.81583, 2.01345,
                     0.306965, 5.68444, 6.03621, 0.65283, 5.67111, 2.06680, 1.78624};
            return ReferenceOptimum{p, 0.43336, 0.25};
        case 7:
            p.alpha = {2.71122, 3.14860, 3.29590};
            p.phi = {6.27750, 2.50188, 3.33956, 6.25125, 5.62825, 3.76442, 1.09039,
                     3.43100, 3.23516, 2.87925, 4.95371, 0.28542, 1.87790, 5.46657,
                     1.14039, 4.75900, 2.68202, 3.51887, 5.54982, 4.35086, 0.478595};
            return ReferenceOptimum{p, 0.43381, 0.15};
        default:
            return std::nullopt;
    }
}

/// Reference properties of the nearest-neighbour state at the optimum.
struct ReferenceProperties {
    int b;
    double concurrence, assistance, A, B, C, purity12, purity1, bloch_length_sq;
};

inline std::optional<ReferenceProperties> reference_properties(int b) {
    switch (b) {
        case 2: return ReferenceProperties{2, 0.414214, 0.585787, 0.292893, 0.207107, 0.174155, 0.550252, 0.646446, 0.5};
        case 3: return ReferenceProperties{3, 0.41825, 0.587251, 0.293626, 0.209126, 0.164125, 0.538009, 0.639055, 0.607465};
        case 4: return ReferenceProperties{4, 0.432000, 0.600000, 0.300000, 0.216000, 0.097378, 0.471242, 0.598965, 0.536326};
        case 5: return ReferenceProperties{5, 0.432471, 0.600131, 0.300066, 0.216236, 0.0925458, 0.467748, 0.597077, 0.554368};
        case 6: return ReferenceProperties{6, 0.433791, 0.601204, 0.300602, 0.216895, -0.069033, 0.452911, 0.58905, 0.519502};
        case 9: return ReferenceProperties{9, 0.434095, 0.601442, 0.300721, 0.217048, -0.0575684, 0.447191, 0.586052, 0.521177};
        default: return std::nullopt;
    }
}

} // namespace fcs::known
