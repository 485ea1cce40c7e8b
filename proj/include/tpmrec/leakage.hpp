#pragma once

#include <cstdint>

#include "tpmrec/tpm.hpp"

namespace tpmrec {

/// Upper bound on what i public synchronization rounds reveal, assuming every round halves
/// the set of weight matrices consistent with the transcript.
struct LeakageEstimate {
  std::int64_t iterations = 0;          ///< i
  double key_space_log2 = 0.0;          ///< K*N*log2(2L+1) - i
  double z_reduction = 0.0;             ///< Z = log_{2L+1}(2^i) = i / log2(2L+1), in weights
  std::int64_t recommended_bit_reduction = 0;  ///< ceil(Z * log2(2L+1)) = i, in bits
};

/// Throws RangeError for negative i.
LeakageEstimate leakage_after(std::int64_t iterations, const TpmParams& params);

/// log2 of the number of distinct weight matrices, K*N*log2(2L+1).
double key_space_log2(const TpmParams& params);

}  // namespace tpmrec
