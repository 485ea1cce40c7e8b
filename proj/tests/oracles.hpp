// Independent reference computations used only by tests. Nothing here calls into the
// library's implementation of the quantity being checked.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

// Direct transcription of the forward pass: sigma_k = sgn(sum_n x_kn w_kn) with
// sgn(0) = -1, tau = prod_k sigma_k.
struct Eval {
  std::vector<int> sigma;
  int tau;
};

inline Eval forward(const std::vector<std::vector<int>>& w, const std::vector<std::vector<int>>& x) {
  Eval e{{}, 1};
  for (std::size_t k = 0; k < w.size(); ++k) {
    long sum = 0;
    for (std::size_t n = 0; n < w[k].size(); ++n) sum += static_cast<long>(x[k][n]) * w[k][n];
    const int s = sum <= 0 ? -1 : 1;
    e.sigma.push_back(s);
    e.tau *= s;
  }
  return e;
}

// Chunk text like "110" read as an unsigned binary numeral, reduced mod 2L+1, shifted by -L.
inline int decode_chunk(const std::string& bits, int bound) {
  const int value = std::stoi(bits, nullptr, 2);
  return value % (2 * bound + 1) - bound;
}

// Explicit R x M matrix from the "first row, then the rest of the first column" description.
inline std::vector<std::vector<int>> toeplitz_matrix(std::size_t rows, std::size_t cols,
                                                     const std::vector<int>& desc) {
  std::vector<std::vector<int>> t(rows, std::vector<int>(cols));
  for (std::size_t j = 0; j < cols; ++j) t[0][j] = desc[j];
  for (std::size_t i = 1; i < rows; ++i) t[i][0] = desc[cols - 1 + i];
  for (std::size_t i = 1; i < rows; ++i) {
    for (std::size_t j = 1; j < cols; ++j) t[i][j] = t[i - 1][j - 1];
  }
  return t;
}

inline std::vector<int> gf2_multiply(const std::vector<std::vector<int>>& m, const std::vector<int>& v) {
  std::vector<int> out;
  for (const auto& row : m) {
    int acc = 0;
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * v[j];
    out.push_back(acc % 2);
  }
  return out;
}

// Standard deviation of a binomial proportion.
inline double proportion_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace oracle
