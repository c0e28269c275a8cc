#include "maxcon/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "maxcon/errors.hpp"

namespace maxcon {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_variance(double sigma2) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw ParameterError("noise: variance must be finite and >= 0, got " +
                         std::to_string(sigma2));
  }
}

}  // namespace

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = splitmix64(h ^ splitmix64(w));
  return h;
}

LinkNoiseModel::LinkNoiseModel(double sigma2_, std::uint64_t seed_)
    : sigma2(sigma2_), seed(seed_) {
  check_variance(sigma2);
}

double LinkNoiseModel::sigma() const { return std::sqrt(sigma2); }

double truncated_variance_factor() {
  const double c = LinkNoiseModel::kTruncation;
  const double pdf = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
  const double mass = std::erf(c / std::numbers::sqrt2);  // 2 Phi(c) - 1
  return 1.0 - 2.0 * c * pdf / mass;
}

NoiseStream::NoiseStream(std::uint64_t sub_seed)
    : sub_seed_(sub_seed), engine_(sub_seed), normal_(0.0, 1.0) {}

double NoiseStream::sample(double sigma2) {
  check_variance(sigma2);
  if (sigma2 == 0.0) return 0.0;
  double z = 0.0;
  do {
    z = normal_(engine_);
  } while (std::abs(z) > LinkNoiseModel::kTruncation);
  return std::sqrt(sigma2) * z;
}

NoiseStream stream_for(const LinkNoiseModel& model, std::uint64_t realization,
                       AgentId sender, AgentId receiver) {
  if (sender == receiver) {
    throw ParameterError("noise: link " + std::to_string(sender) + " -> " +
                         std::to_string(receiver) + " is a self-link");
  }
  return NoiseStream(derive_seed({model.seed, realization, sender, receiver}));
}

LinkChannel::LinkChannel(const Graph& g) : graph_(&g) {}

LinkChannel::LinkChannel(const Graph& g, const LinkNoiseModel& model,
                         std::uint64_t realization)
    : graph_(&g), model_(model) {
  check_variance(model.sigma2);
  streams_.reserve(g.num_directed_links());
  for (AgentId receiver = 0; receiver < g.num_agents(); ++receiver)
    for (AgentId sender : g.neighbors(receiver))
      streams_.push_back(stream_for(model, realization, sender, receiver));
}

double LinkChannel::transmit(AgentId sender, AgentId receiver, double value) {
  ++messages_;
  if (!model_) return value;
  return value + streams_[graph_->link_index(sender, receiver)].sample(model_->sigma2);
}

}  // namespace maxcon
