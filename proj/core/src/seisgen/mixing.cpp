#include <cmath>
#include <numeric>
#include <string>

#include "storseismic/errors.hpp"
#include "storseismic/seisgen/synthesis.hpp"

namespace storseismic {

MixedCorpus build_mixed_corpus(
    std::span<const ShotGather> domain_a, std::span<const ShotGather> domain_b,
    double field_fraction, std::size_t total, Rng& rng,
    const std::function<ShotGather(std::size_t)>& synthesize_extra) {
  if (!(field_fraction >= 0.0 && field_fraction <= 1.0)) {
    throw ContractError("field fraction must lie in [0, 1]");
  }
  const auto want_b = static_cast<std::size_t>(
      std::llround(field_fraction * static_cast<double>(total)));
  const std::size_t want_a = total - want_b;
  if (domain_b.size() < want_b) {
    throw ContractError("field-proxy domain holds " +
                        std::to_string(domain_b.size()) + " gathers, need " +
                        std::to_string(want_b));
  }
  if (domain_a.size() < want_a && !synthesize_extra) {
    throw ContractError("synthetic domain holds " +
                        std::to_string(domain_a.size()) + " gathers, need " +
                        std::to_string(want_a) + " and no top-up was given");
  }

  auto pick = [&rng](std::size_t available, std::size_t count) {
    std::vector<std::size_t> idx(available);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(idx));
    idx.resize(std::min(count, available));
    return idx;
  };

  MixedCorpus corpus;
  corpus.gathers.reserve(total);
  for (std::size_t i : pick(domain_b.size(), want_b)) {
    corpus.gathers.push_back(domain_b[i]);
  }
  corpus.from_b = want_b;
  for (std::size_t i : pick(domain_a.size(), want_a)) {
    corpus.gathers.push_back(domain_a[i]);
    ++corpus.from_a;
  }
  for (std::size_t i = 0; corpus.from_a + corpus.synthesized < want_a; ++i) {
    corpus.gathers.push_back(synthesize_extra(i));
    ++corpus.synthesized;
  }
  rng.shuffle(std::span<ShotGather>(corpus.gathers));
  return corpus;
}

}  // namespace storseismic
