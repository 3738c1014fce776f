// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace contentlink {

/// Raised for every contract violation in the library. The message is the
/// short error tag (e.g. "no events", "undefined modularity") optionally
/// followed by ": detail".
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::function<void(std::string_view)>& warning_sink() {
  static std::function<void(std::string_view)> sink = [](std::string_view msg) {
    std::clog << "warning: " << msg << '\n';
  };
  return sink;
}

inline std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Replace the process-wide warning sink. Pass an empty function to silence.
inline void set_warning_sink(std::function<void(std::string_view)> sink) {
  std::lock_guard lock(detail::warning_mutex());
  detail::warning_sink() = std::move(sink);
}

inline void warn(std::string_view msg) {
  std::lock_guard lock(detail::warning_mutex());
  if (detail::warning_sink()) detail::warning_sink()(msg);
}

// Seed derivation: FNV-1a over the tagged parts, finalized with splitmix64.
// Stable across platforms and standard library implementations.

namespace detail {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_part(std::uint64_t h, std::string_view s) {
  // Length prefix keeps ("ab","c") distinct from ("a","bc").
  return fnv1a(fnv1a(h, static_cast<std::uint64_t>(s.size())), s);
}
constexpr std::uint64_t mix_part(std::uint64_t h, const char* s) { return mix_part(h, std::string_view(s)); }
inline std::uint64_t mix_part(std::uint64_t h, const std::string& s) { return mix_part(h, std::string_view(s)); }

template <class T>
  requires std::is_integral_v<T>
constexpr std::uint64_t mix_part(std::uint64_t h, T v) {
  return fnv1a(h, static_cast<std::uint64_t>(v));
}

}  // namespace detail

/// Derive an independent component seed from a master seed and a tag path,
/// e.g. derive_seed(seed, "lda", event_id). Adding a new tag path never
/// perturbs the seeds of existing ones.
template <class... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t master, const Parts&... parts) {
  std::uint64_t h = detail::fnv1a(detail::kFnvOffset, master);
  ((h = detail::mix_part(h, parts)), ...);
  return detail::splitmix64(h);
}

/// Shortest representation that parses back to the identical double.
inline std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Split on a single-character delimiter, keeping empty fields.
inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace contentlink
