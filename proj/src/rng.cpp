#include "addcoal/rng.hpp"

#include <cmath>

#include "addcoal/core.hpp"

namespace addcoal {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master, std::uint64_t index) {
  const std::uint64_t a = mix64(master);
  const std::uint64_t b = mix64(a ^ mix64(index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed), stream_index_(stream_index), engine_(seeded_engine(master_seed, stream_index)) {}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(mix64(master_seed_ ^ mix64(stream_index_)), index);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw InvalidArgument("uniform_index: empty range");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw InvalidArgument("exponential: rate must be positive");
  return -std::log(uniform_open()) / rate;
}

double RngStream::normal() { return normal_(engine_); }

std::uint64_t RngStream::poisson(double mean) {
  if (mean < 0.0) throw InvalidArgument("poisson: negative mean");
  if (mean == 0.0) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(engine_);
}

}  // namespace addcoal
