#pragma once

#include <vector>

#include "fperturb/experiments.hpp"
#include "fperturb/lu_bounds.hpp"
#include "fperturb/qr_bounds.hpp"
#include "fperturb/report.hpp"

namespace fperturb {

// Bound reports as rows of (quantity, value, condition_value, threshold,
// applicable). A rigorous bound whose condition fails has value n/a;
// first-order values are always shown next to their own condition.

Document lu_normwise_document(const LuNormwiseReport& r);
Document lu_componentwise_document(const LuComponentwiseReport& r);
Document qr_normwise_document(const QrNormwiseReport& r);
Document qr_componentwise_document(const QrComponentwiseReport& r);

/// One row per bound check, one per skipped trial, and one per level of each
/// first-order trend. Timings are zero when `deterministic` is set.
Document verification_document(const VerificationReport& v, const std::vector<FirstOrderTrend>& trends,
                               bool deterministic);

}  // namespace fperturb
