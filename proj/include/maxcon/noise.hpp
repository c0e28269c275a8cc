#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <vector>

#include "maxcon/graph.hpp"

namespace maxcon {

/// Mixes a sequence of words into one 64-bit seed (splitmix64 finalizer per word).
/// Stable across platforms and builds.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words);

/// Zero-mean Gaussian link noise truncated at +-3 sigma.
///
/// `sigma2` is the variance of the Gaussian before truncation; the emitted
/// samples have variance truncated_variance_factor() * sigma2.
struct LinkNoiseModel {
  static constexpr double kTruncation = 3.0;

  double sigma2 = 0.0;
  std::uint64_t seed = 0;

  LinkNoiseModel() = default;
  LinkNoiseModel(double sigma2, std::uint64_t seed);

  double sigma() const;
  double bound() const { return kTruncation * sigma(); }
};

/// Var(Z | |Z| <= 3) for standard normal Z, ~0.9733.
double truncated_variance_factor();

/// One independent random stream, owned by a single directed link.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t sub_seed);

  /// One draw of N(0, sigma2) conditioned on |w| <= 3 sigma, by rejection.
  /// sigma2 == 0 yields exactly 0 without advancing the stream.
  double sample(double sigma2);

  std::uint64_t sub_seed() const { return sub_seed_; }

 private:
  std::uint64_t sub_seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Stream for the directed link sender -> receiver in a given realization.
/// Throws ParameterError when sender == receiver.
NoiseStream stream_for(const LinkNoiseModel& model, std::uint64_t realization,
                       AgentId sender, AgentId receiver);

/// The set of directed links of one graph in one realization.
///
/// transmit() is the only way engines exchange values: it adds link noise (if
/// any) and counts messages so communication cost can be audited.
class LinkChannel {
 public:
  /// Noiseless channel.
  explicit LinkChannel(const Graph& g);
  LinkChannel(const Graph& g, const LinkNoiseModel& model, std::uint64_t realization);

  double transmit(AgentId sender, AgentId receiver, double value);

  bool noisy() const { return model_.has_value(); }
  std::uint64_t messages_sent() const { return messages_; }

 private:
  const Graph* graph_;
  std::optional<LinkNoiseModel> model_;
  std::vector<NoiseStream> streams_;  // indexed by Graph::link_index
  std::uint64_t messages_ = 0;
};

}  // namespace maxcon
