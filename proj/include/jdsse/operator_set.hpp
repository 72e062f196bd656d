#pragma once

#include <string>
#include <vector>

#include "jdsse/linalg.hpp"

namespace jdsse {

/// Operator family defining a generalized unravelling over n bath sectors.
///
/// For each sector j there is a Hermitian H[j]. The L channels act within
/// a sector (L[alpha][j]); the first d1 of them are diffusive, the rest are
/// counting channels. The R channels transfer amplitude between sectors
/// (R[alpha][j][k], source k, destination j); the first d2 are diffusive.
struct OperatorSet {
    int components = 0;  // n
    int dim = 0;         // Hilbert dimension per sector

    std::vector<CMat> H;                         // [j]
    int d1 = 0;                                  // diffusive L count
    std::vector<std::vector<CMat>> L;            // [alpha][j]
    int d2 = 0;                                  // diffusive R count
    std::vector<std::vector<std::vector<CMat>>> R;  // [alpha][j][k]

    int m1() const { return static_cast<int>(L.size()); }
    int m2() const { return static_cast<int>(R.size()); }

    /// Shape and invariant checks (Hermitian H to 1e-12, finite entries,
    /// 0 <= d1 <= m1, 0 <= d2 <= m2). Throws InvalidParamsError.
    void validate() const;
};

/// Identifies one noise channel of an OperatorSet. `target` is the source
/// sector k and is meaningful for R channels only.
struct ChannelId {
    enum class Kind { DiffusiveL, CountingL, DiffusiveR, CountingR };
    Kind kind;
    int alpha = 0;
    int target = 0;
};

/// Parse an OperatorSet from its JSON document form:
/// {"n":..., "H":[...], "L":{"d1":..., "ops":[...]}, "R":{"d2":..., "ops":[...]}}
/// with matrices as nested [re, im] arrays.
OperatorSet operator_set_from_json_text(const std::string& text);

OperatorSet load_operator_set(const std::string& path);

}  // namespace jdsse
