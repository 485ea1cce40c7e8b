#include "tpmrec/leakage.hpp"

#include <cmath>

#include "tpmrec/errors.hpp"

namespace tpmrec {

double key_space_log2(const TpmParams& params) {
  params.validate();
  return static_cast<double>(params.weight_count()) * params.bits_of_entropy_per_weight();
}

LeakageEstimate leakage_after(std::int64_t iterations, const TpmParams& params) {
  if (iterations < 0) throw RangeError("leakage_after: iteration count must be >= 0");
  const double per_weight = params.bits_of_entropy_per_weight();
  LeakageEstimate out;
  out.iterations = iterations;
  out.key_space_log2 = key_space_log2(params) - static_cast<double>(iterations);
  out.z_reduction = static_cast<double>(iterations) / per_weight;
  // Z * log2(2L+1) is i up to rounding; use the exact integer.
  out.recommended_bit_reduction = iterations;
  return out;
}

}  // namespace tpmrec
