#include <doctest.h>

#include <cmath>
#include <set>

#include "persist/parallel.hpp"
#include "persist/rng.hpp"

using namespace persist;

TEST_SUITE("rng") {

// Known-answer vectors of the reference Philox4x64-10 implementation.
TEST_CASE("philox4x64 known answers") {
  using A4 = std::array<std::uint64_t, 4>;
  CHECK(philox4x64({0, 0, 0, 0}, {0, 0}) ==
        A4{0x16554d9eca36314cull, 0xdb20fe9d672d0fdcull, 0xd7e772cee186176bull, 0x7e68b68aec7ba23bull});
  const std::uint64_t ones = ~0ull;
  CHECK(philox4x64({ones, ones, ones, ones}, {ones, ones}) ==
        A4{0x87b092c3013fe90bull, 0x438c3c67be8d0224ull, 0x9cc7d7c69cd777b6ull, 0xa09caebf594f0ba0ull});
  CHECK(philox4x64({0x243f6a8885a308d3ull, 0x13198a2e03707344ull, 0xa4093822299f31d0ull, 0x082efa98ec4e6c89ull},
                   {0x452821e638d01377ull, 0xbe5466cf34e90c6cull}) ==
        A4{0xa528f45403e61d95ull, 0x38c72dbd566e9788ull, 0xa5a1610e72fd18b5ull, 0x57bd43b5e52b7fe6ull});
}

TEST_CASE("streams are pure in (seed, index)") {
  RngStream a = derive_stream(7, 3), b = derive_stream(7, 3), c = derive_stream(7, 4), d = derive_stream(8, 3);
  bool differ_c = false, differ_d = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differ_c |= x != c.next_u64();
    differ_d |= x != d.next_u64();
  }
  CHECK(differ_c);
  CHECK(differ_d);
}

TEST_CASE("counter offset resumes the stream") {
  RngStream a(1, 2);
  for (int i = 0; i < 8; ++i) a.next_u64();  // two blocks
  RngStream b(1, 2, 2);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform lies in the open unit interval with the right moments") {
  RngStream r(11, 0);
  const int n = 200'000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sum2 / n - 1.0 / 3) < 0.005);
}

TEST_CASE("normal moments") {
  RngStream r(12, 0);
  const int n = 200'000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  CHECK(std::abs(m1 / n) < 5 / std::sqrt(n));
  CHECK(std::abs(m2 / n - 1) < 5 * std::sqrt(2.0 / n));
  CHECK(std::abs(m4 / n - 3) < 5 * std::sqrt(96.0 / n));
}

TEST_CASE("exponential mean and sign balance") {
  RngStream r(13, 0);
  const int n = 100'000;
  double s = 0;
  long plus = 0;
  for (int i = 0; i < n; ++i) {
    s += r.exponential();
    plus += r.sign() > 0;
  }
  CHECK(std::abs(s / n - 1) < 5 / std::sqrt(n));
  CHECK(std::abs(plus - n / 2.0) < 5 * std::sqrt(n / 4.0));
}

TEST_CASE("mix_seed separates salts") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(mix_seed(42, k));
  CHECK(seen.size() == 1000);
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}

TEST_CASE("for_each_batch covers every index once, any worker count") {
  for (int workers : {1, 3, 8}) {
    std::vector<int> hits(25'001, 0);
    for_each_batch(
        static_cast<std::int64_t>(hits.size()),
        [&](std::int64_t, std::int64_t begin, std::int64_t end) {
          for (auto i = begin; i < end; ++i) ++hits[static_cast<std::size_t>(i)];
        },
        1000, workers);
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  CHECK(batch_count(0) == 0);
  CHECK(batch_count(10'001) == 2);
}

TEST_CASE("for_each_batch rethrows") {
  CHECK_THROWS_AS(for_each_batch(
                      100, [](std::int64_t b, std::int64_t, std::int64_t) {
                        if (b == 3) throw std::runtime_error("boom");
                      },
                      10, 2),
                  std::runtime_error);
}

}
