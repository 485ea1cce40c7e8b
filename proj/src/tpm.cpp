#include "tpmrec/tpm.hpp"

#include <cmath>
#include <string>

#include "tpmrec/errors.hpp"

namespace tpmrec {

void TpmParams::validate() const {
  if (hidden_units < 1 || inputs_per_unit < 1 || weight_bound < 1) {
    throw RangeError("TpmParams: K, N and L must all be >= 1 (got K=" +
                     std::to_string(hidden_units) + ", N=" + std::to_string(inputs_per_unit) +
                     ", L=" + std::to_string(weight_bound) + ")");
  }
}

int TpmParams::bits_per_weight() const noexcept {
  int bits = 0;
  while ((1 << bits) < alphabet_size()) ++bits;
  return bits;
}

double TpmParams::bits_of_entropy_per_weight() const noexcept {
  return std::log2(static_cast<double>(alphabet_size()));
}

namespace {

void require_same_shape(const TpmParams& a, const TpmParams& b, const char* what) {
  if (a.hidden_units != b.hidden_units || a.inputs_per_unit != b.inputs_per_unit) {
    throw DimensionError(std::string(what) + ": shape mismatch (" +
                         std::to_string(a.hidden_units) + "x" + std::to_string(a.inputs_per_unit) +
                         " vs " + std::to_string(b.hidden_units) + "x" +
                         std::to_string(b.inputs_per_unit) + ")");
  }
}

}  // namespace

InputVector::InputVector(const TpmParams& params, std::vector<std::int8_t> entries)
    : params_(params), entries_(std::move(entries)) {
  params_.validate();
  if (entries_.size() != params_.weight_count()) {
    throw DimensionError("InputVector: expected " + std::to_string(params_.weight_count()) +
                         " entries, got " + std::to_string(entries_.size()));
  }
  for (auto x : entries_) {
    if (x != 1 && x != -1) throw RangeError("InputVector: entries must be +1 or -1");
  }
}

InputVector InputVector::random(const TpmParams& params, Rng& rng) {
  std::vector<std::int8_t> entries(params.weight_count());
  for (auto& x : entries) x = rng.bit() ? 1 : -1;
  return InputVector(params, std::move(entries));
}

std::span<const std::int8_t> InputVector::row(int k) const {
  return std::span<const std::int8_t>(entries_).subspan(
      static_cast<std::size_t>(k) * params_.inputs_per_unit, params_.inputs_per_unit);
}

Tpm::Tpm(const TpmParams& params) : params_(params) {
  params_.validate();
  weights_.assign(params_.weight_count(), 0);
}

Tpm::Tpm(const TpmParams& params, std::vector<int> weights)
    : params_(params), weights_(std::move(weights)) {
  params_.validate();
  if (weights_.size() != params_.weight_count()) {
    throw DimensionError("Tpm: expected " + std::to_string(params_.weight_count()) +
                         " weights, got " + std::to_string(weights_.size()));
  }
  for (int w : weights_) {
    if (w < -params_.weight_bound || w > params_.weight_bound) {
      throw RangeError("Tpm: weight " + std::to_string(w) + " outside [-L, L]");
    }
  }
}

Tpm Tpm::random(const TpmParams& params, Rng& rng) {
  Tpm tpm(params);
  for (auto& w : tpm.weights_) w = rng.uniform_int(-params.weight_bound, params.weight_bound);
  return tpm;
}

std::span<const int> Tpm::row(int k) const {
  return std::span<const int>(weights_).subspan(
      static_cast<std::size_t>(k) * params_.inputs_per_unit, params_.inputs_per_unit);
}

int Tpm::weight(int k, int n) const {
  return weights_.at(static_cast<std::size_t>(k) * params_.inputs_per_unit + n);
}

void Tpm::set_weight(std::size_t index, int value) {
  if (value < -params_.weight_bound || value > params_.weight_bound) {
    throw RangeError("Tpm::set_weight: value outside [-L, L]");
  }
  weights_.at(index) = value;
}

std::uint64_t Tpm::digest() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int w : weights_) {
    h ^= static_cast<std::uint8_t>(w + params_.weight_bound);
    h *= 0x100000001b3ULL;
  }
  return h;
}

TpmEvaluation evaluate(const Tpm& tpm, const InputVector& input) {
  require_same_shape(tpm.params(), input.params(), "evaluate");
  const int k_count = tpm.params().hidden_units;
  TpmEvaluation out;
  out.sigma.resize(k_count);
  out.local_field.resize(k_count);
  out.tau = 1;
  for (int k = 0; k < k_count; ++k) {
    auto w = tpm.row(k);
    auto x = input.row(k);
    int field = 0;
    for (std::size_t n = 0; n < w.size(); ++n) field += x[n] * w[n];
    out.local_field[k] = field;
    out.sigma[k] = signum(field);
    out.tau *= out.sigma[k];
  }
  return out;
}

void apply_hebbian(Tpm& tpm, const InputVector& input, const TpmEvaluation& own_eval,
                   int partner_tau) {
  require_same_shape(tpm.params(), input.params(), "hebbian_step");
  if (own_eval.tau != partner_tau) {
    throw ContractViolation("hebbian_step: outputs disagree; learning must be skipped");
  }
  const auto& p = tpm.params_;
  if (own_eval.sigma.size() != static_cast<std::size_t>(p.hidden_units)) {
    throw DimensionError("hebbian_step: evaluation has wrong number of hidden units");
  }
  for (int k = 0; k < p.hidden_units; ++k) {
    const int s = own_eval.sigma[k];
    if (s != own_eval.tau) continue;
    auto x = input.row(k);
    int* w = tpm.weights_.data() + static_cast<std::size_t>(k) * p.inputs_per_unit;
    for (int n = 0; n < p.inputs_per_unit; ++n) {
      w[n] = clamp_weight(w[n] + x[n] * s, p.weight_bound);
    }
  }
}

Tpm hebbian_step(const Tpm& tpm, const InputVector& input, const TpmEvaluation& own_eval,
                 int partner_tau) {
  Tpm next = tpm;
  apply_hebbian(next, input, own_eval, partner_tau);
  return next;
}

std::size_t codec_bits(const TpmParams& params) noexcept {
  return params.weight_count() * static_cast<std::size_t>(params.bits_per_weight());
}

Tpm bits_to_weights(const BitKey& key, const TpmParams& params) {
  params.validate();
  const std::size_t needed = codec_bits(params);
  if (key.size() < needed) {
    throw InsufficientMaterial("bits_to_weights: need " + std::to_string(needed) +
                               " bits, key has " + std::to_string(key.size()));
  }
  const int width = params.bits_per_weight();
  const int q = params.alphabet_size();
  std::vector<int> weights(params.weight_count());
  std::size_t pos = 0;
  for (auto& w : weights) {
    int value = 0;
    for (int b = 0; b < width; ++b) value = (value << 1) | key[pos++];
    w = value % q - params.weight_bound;
  }
  return Tpm(params, std::move(weights));
}

BitKey weights_to_bits(const Tpm& tpm) {
  const auto& p = tpm.params();
  const int width = p.bits_per_weight();
  BitKey key;
  for (int w : tpm.weights()) {
    const int value = w + p.weight_bound;
    for (int b = width - 1; b >= 0; --b) key.push_back((value >> b) & 1);
  }
  return key;
}

std::size_t weight_mismatches(const Tpm& a, const Tpm& b) {
  require_same_shape(a.params(), b.params(), "weight_overlap");
  if (a.params().weight_bound != b.params().weight_bound) {
    throw DimensionError("weight_overlap: weight bounds differ");
  }
  auto wa = a.weights();
  auto wb = b.weights();
  std::size_t diff = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) diff += wa[i] != wb[i];
  return diff;
}

double weight_overlap(const Tpm& a, const Tpm& b) {
  const std::size_t diff = weight_mismatches(a, b);
  const auto total = static_cast<double>(a.params().weight_count());
  return (total - static_cast<double>(diff)) / total;
}

}  // namespace tpmrec
