#include "fdrelay/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <thread>
#include <vector>

#include "fdrelay/error.hpp"
#include "fdrelay/sfun.hpp"

namespace fdrelay::mc {

namespace {

constexpr std::uint64_t kChunkSize = 1u << 15;

// Running mean and centred second moment of one chunk.
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    const double n = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / n;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
  }
};

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates chunk_fn(begin, end) for every chunk of [0, n) on a worker pool and
// returns the per-chunk results in chunk order.
template <typename Result, typename ChunkFn>
std::vector<Result> run_chunks(std::uint64_t n, unsigned threads, ChunkFn chunk_fn) {
  const std::uint64_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<Result> results(n_chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
      const std::uint64_t begin = c * kChunkSize;
      const std::uint64_t end = std::min(n, begin + kChunkSize);
      results[c] = chunk_fn(begin, end);
    }
  };
  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), n_chunks));
  if (n_workers <= 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(n_workers);
  for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  pool.clear();  // joins
  return results;
}

McEstimate from_moments(const std::vector<Moments>& chunks, const McOptions& opts) {
  Moments total;
  for (const auto& c : chunks) total.merge(c);
  const double n = static_cast<double>(total.count);
  const double var = total.count > 1 ? total.m2 / (n - 1.0) : 0.0;
  return {total.mean, std::sqrt(std::max(var, 0.0) / n), total.count, opts.seed};
}

void require_samples(std::uint64_t n, std::uint64_t minimum, const char* what) {
  if (n < minimum) {
    throw DomainError(std::string(what) + ": need at least " + std::to_string(minimum) +
                      " samples");
  }
}

std::complex<double> complex_normal(rng::SampleStream& s) {
  // Box-Muller; unit total power.
  const double r = std::sqrt(-std::log(s.uniform()));
  const double theta = 2.0 * std::numbers::pi * s.uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

Gammas draw_gammas(const LinkStats& stats, rng::SampleStream& stream) {
  const double sr = -stats.lambda_sr * std::log(stream.uniform());
  const double rd = -stats.lambda_rd * std::log(stream.uniform());
  const double u = stream.uniform();
  const double li = stats.lambda_li > 0.0 ? -stats.lambda_li * std::log(u) : 0.0;
  return {sr, rd, li};
}

double sinr_exact(double gamma_sr, double gamma_rd, double gamma_li) {
  const double a = gamma_sr / (gamma_li + 1.0);
  const double b = gamma_rd;
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b / (a + b + 1.0);
}

double sinr_approx(double gamma_sr, double gamma_rd, double gamma_li) {
  if (gamma_sr == 0.0 || gamma_rd == 0.0) return 0.0;
  return gamma_sr * gamma_rd / (gamma_sr + (gamma_rd + 1.0) * (gamma_li + 1.0));
}

McEstimate estimate_outage(const LinkStats& stats, double threshold, const McOptions& opts) {
  require_samples(opts.n_samples, kMinSamples, "estimate_outage");
  if (!(threshold >= 0.0)) throw DomainError("estimate_outage: threshold must be nonnegative");
  const auto counts = run_chunks<std::uint64_t>(
      opts.n_samples, opts.threads, [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
          rng::SampleStream stream(opts.seed, i);
          const auto g = draw_gammas(stats, stream);
          if (sinr_exact(g.sr, g.rd, g.li) < threshold) ++hits;
        }
        return hits;
      });
  std::uint64_t hits = 0;
  for (auto c : counts) hits += c;
  const double n = static_cast<double>(opts.n_samples);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), opts.n_samples, opts.seed};
}

McEstimate estimate_ser_semianalytic(const LinkStats& stats, const Modulation& mod,
                                     const McOptions& opts) {
  require_samples(opts.n_samples, kMinSamples, "estimate_ser_semianalytic");
  const auto chunks = run_chunks<Moments>(
      opts.n_samples, opts.threads, [&](std::uint64_t begin, std::uint64_t end) {
        Moments m;
        for (std::uint64_t i = begin; i < end; ++i) {
          rng::SampleStream stream(opts.seed, i);
          const auto g = draw_gammas(stats, stream);
          const double gamma = sinr_exact(g.sr, g.rd, g.li);
          m.push(mod.alpha * sfun::gauss_q(std::sqrt(mod.beta * gamma)));
        }
        return m;
      });
  return from_moments(chunks, opts);
}

McEstimate estimate_ser_symbol_level(const LinkStats& stats, const Modulation& mod,
                                     const McOptions& opts) {
  if (!mod.is_bpsk()) {
    throw DomainError("estimate_ser_symbol_level: only BPSK is supported");
  }
  require_samples(opts.n_samples, kMinSymbols, "estimate_ser_symbol_level");
  const double amp_sr = std::sqrt(stats.lambda_sr);
  const double amp_rd = std::sqrt(stats.lambda_rd);
  const double amp_li = std::sqrt(stats.lambda_li);
  const auto counts = run_chunks<std::uint64_t>(
      opts.n_samples, opts.threads, [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t errors = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
          rng::SampleStream s(opts.seed, i);
          // Channel gains already include transmit power and path loss.
          const auto g_sr = amp_sr * complex_normal(s);
          const auto g_rd = amp_rd * complex_normal(s);
          const auto g_li = amp_li * complex_normal(s);
          const auto x_loop = complex_normal(s);
          const auto n_relay = complex_normal(s);
          const auto n_dest = complex_normal(s);
          const double x_src = s.uniform() < 0.5 ? -1.0 : 1.0;

          const double gain =
              1.0 / std::sqrt(std::norm(g_sr) + std::norm(g_li) + SystemConfig::kNoisePower);
          const auto y_relay = g_sr * x_src + g_li * x_loop + n_relay;
          const auto y_dest = g_rd * gain * y_relay + n_dest;
          const double metric = std::real(std::conj(g_rd * gain * g_sr) * y_dest);
          const double decided = metric >= 0.0 ? 1.0 : -1.0;
          if (decided != x_src) ++errors;
        }
        return errors;
      });
  std::uint64_t errors = 0;
  for (auto c : counts) errors += c;
  const double n = static_cast<double>(opts.n_samples);
  const double p = static_cast<double>(errors) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), opts.n_samples, opts.seed};
}

}  // namespace fdrelay::mc
