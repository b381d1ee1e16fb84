// Copyright (c) the scodec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "scodec/error.h"
#include "scodec/range_coder.h"

namespace scodec {
namespace {

// Random table over `k` symbols with every frequency >= 1.
CdfTable RandomTable(std::mt19937_64& rng, int k) {
  std::vector<double> w(k);
  std::exponential_distribution<double> e(1.0);
  double sum = 0.0;
  for (double& v : w) sum += (v = std::pow(e(rng), 3.0));
  CdfTable t;
  t.cdf.resize(k + 1);
  const uint32_t spare = kProbTotal - k;
  uint32_t used = 0;
  for (int i = 0; i < k; ++i) {
    const uint32_t c = 1 + static_cast<uint32_t>(w[i] / sum * spare);
    t.cdf[i + 1] = t.cdf[i] + c;
    used += c;
  }
  // Give the rounding remainder to the last symbol.
  t.cdf[k] += kProbTotal - used;
  return t;
}

CdfTable Uniform(int k) {
  CdfTable t;
  for (int i = 0; i <= k; ++i) {
    t.cdf.push_back(static_cast<uint32_t>(
        static_cast<uint64_t>(i) * kProbTotal / k));
  }
  return t;
}

int Sample(std::mt19937_64& rng, const CdfTable& t) {
  std::uniform_int_distribution<uint32_t> u(0, kProbTotal - 1);
  return t.Find(u(rng));
}

double IdealBits(const std::vector<int>& s, const std::vector<CdfTable>& t) {
  double bits = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    const CdfTable& tab = t.size() == 1 ? t[0] : t[i];
    bits -= std::log2(static_cast<double>(tab.Frequency(s[i])) / kProbTotal);
  }
  return bits;
}

TEST_CASE("table helpers") {
  const CdfTable t{{0, 100, 65000, 65536}};
  CHECK(t.Valid());
  CHECK(t.size() == 3);
  CHECK(t.Find(0) == 0);
  CHECK(t.Find(99) == 0);
  CHECK(t.Find(100) == 1);
  CHECK(t.Find(65535) == 2);
  CHECK_FALSE(CdfTable{{0, 10, 10, 65536}}.Valid());
  CHECK_FALSE(CdfTable{{0, 65535}}.Valid());
}

TEST_CASE("empty sequence flushes at most 8 bytes") {
  const std::vector<CdfTable> t{Uniform(4)};
  const Bytes b = EncodeStream({}, t);
  CHECK(b.size() <= 8);
  CHECK(DecodeStream(b, t, 0).empty());
}

TEST_CASE("1000 fair binary symbols take 125..135 bytes") {
  std::mt19937_64 rng(5);
  std::vector<int> s(1000);
  for (int& v : s) v = static_cast<int>(rng() & 1);
  const std::vector<CdfTable> t{{{0, 32768, 65536}}};
  const Bytes b = EncodeStream(s, t);
  CHECK(b.size() >= 125);
  CHECK(b.size() <= 135);
  CHECK(DecodeStream(b, t, s.size()) == s);
}

TEST_CASE("random symbols and tables round trip") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const size_t n = rng() % 200;
    std::vector<CdfTable> tables;
    std::vector<int> symbols;
    for (size_t i = 0; i < n; ++i) {
      tables.push_back(RandomTable(rng, 2 + static_cast<int>(rng() % 300)));
      symbols.push_back(Sample(rng, tables.back()));
    }
    const Bytes b = EncodeStream(symbols, tables);
    REQUIRE(DecodeStream(b, tables, n) == symbols);
  }
}

TEST_CASE("extreme frequencies round trip") {
  // Frequency-1 symbols next to a dominant one, the hardest case for a
  // carry-less coder.
  CdfTable skew;
  skew.cdf = {0, 1, 2, 65535, 65536};
  std::mt19937_64 rng(3);
  std::vector<int> s(20000);
  for (int& v : s) {
    const uint64_t r = rng() % 100;
    v = r == 0 ? 0 : r == 1 ? 1 : r == 2 ? 3 : 2;
  }
  const std::vector<CdfTable> t{skew};
  CHECK(DecodeStream(EncodeStream(s, t), t, s.size()) == s);
}

TEST_CASE("truncation is detected") {
  std::mt19937_64 rng(7);
  std::vector<CdfTable> tables;
  std::vector<int> symbols;
  for (int i = 0; i < 500; ++i) {
    tables.push_back(RandomTable(rng, 16));
    symbols.push_back(Sample(rng, tables.back()));
  }
  const Bytes b = EncodeStream(symbols, tables);
  for (size_t cut = 1; cut <= 3; ++cut) {
    const Bytes shorter(b.begin(), b.end() - cut);
    bool detected = false;
    try {
      detected = DecodeStream(shorter, tables, symbols.size()) != symbols;
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDecode);
      detected = true;
    }
    CHECK(detected);
  }
  Bytes longer = b;
  longer.push_back(0);
  CHECK_THROWS_AS(DecodeStream(longer, tables, symbols.size()), Error);
}

TEST_CASE("degenerate single-symbol alphabet costs almost nothing") {
  const std::vector<CdfTable> t{{{0, kProbTotal}}};
  const std::vector<int> s(10000, 0);
  const Bytes b = EncodeStream(s, t);
  CHECK(b.size() <= 8);
  CHECK(DecodeStream(b, t, s.size()) == s);
}

TEST_CASE("length stays within the efficiency bound") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const CdfTable tab = RandomTable(rng, 2 + static_cast<int>(rng() % 64));
    std::vector<int> s(5000);
    for (int& v : s) v = Sample(rng, tab);
    const std::vector<CdfTable> t{tab};
    const double ideal_bytes = IdealBits(s, t) / 8.0;
    const Bytes b = EncodeStream(s, t);
    CHECK(b.size() <= ideal_bytes + 0.01 * ideal_bytes + 32);
    CHECK(8.0 * b.size() >= 8.0 * ideal_bytes - 1.0);
  }
}

TEST_CASE("invalid symbols and intervals are rejected") {
  RangeEncoder enc;
  const CdfTable t = Uniform(4);
  CHECK_THROWS_AS(enc.Encode(t, 4), Error);
  CHECK_THROWS_AS(enc.Encode(t, -1), Error);
  CHECK_THROWS_AS(enc.Encode(65535u, 2u), Error);
  CHECK_THROWS_AS(enc.Encode(0u, 0u), Error);
  const std::vector<CdfTable> two{t, t};
  const std::vector<int> three{0, 1, 2};
  CHECK_THROWS_AS(EncodeStream(three, two), Error);
}

TEST_CASE("output is deterministic") {
  std::mt19937_64 rng(17);
  std::vector<CdfTable> tables;
  std::vector<int> symbols;
  for (int i = 0; i < 300; ++i) {
    tables.push_back(RandomTable(rng, 40));
    symbols.push_back(Sample(rng, tables.back()));
  }
  CHECK(EncodeStream(symbols, tables) == EncodeStream(symbols, tables));
}

}  // namespace
}  // namespace scodec
