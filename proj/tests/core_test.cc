// bat/tests/core_test.cc
//
// Copyright (c)  2026  bat-lattice authors

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "bat/log_math.h"
#include "bat/memory.h"
#include "bat/rng.h"
#include "bat/tensor.h"
#include "bat/tensor_io.h"
#include "doctest.h"

namespace bat {

TEST_CASE("LogSumExp examples") {
  CHECK(LogSumExp(std::log(0.5), std::log(0.5)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(LogSumExp(kNegInf, -3.25) == -3.25);
  CHECK(LogSumExp(-3.25, kNegInf) == -3.25);
  CHECK(LogSumExp(kNegInf, kNegInf) == kNegInf);
  CHECK(LogSumExp(0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(std::isnan(LogSumExp(std::nan(""), 1.0)));
}

TEST_CASE("LogSumExp is commutative and associative on random triples") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    double a = rng.Uniform(-50, 50), b = rng.Uniform(-50, 50),
           c = rng.Uniform(-50, 50);
    CHECK(std::abs(LogSumExp(a, b) - LogSumExp(b, a)) <= 1e-12);
    CHECK(std::abs(LogSumExp(LogSumExp(a, b), c) -
                   LogSumExp(a, LogSumExp(b, c))) <= 1e-12);
  }
}

TEST_CASE("LogSoftmax examples") {
  auto half = LogSoftmax(std::vector<double>{0, 0});
  CHECK(half[0] == doctest::Approx(std::log(0.5)));
  CHECK(half[1] == doctest::Approx(std::log(0.5)));

  for (double c : {-700.0, 0.0, 3.5, 900.0}) {
    auto third = LogSoftmax(std::vector<double>{c, c, c});
    for (double v : third) CHECK(v == doctest::Approx(std::log(1.0 / 3)));
  }

  auto r = LogSoftmax(std::vector<double>{1, 0});
  CHECK(r[0] == doctest::Approx(-0.3133).epsilon(1e-4));
  CHECK(r[1] == doctest::Approx(-1.3133).epsilon(1e-4));
  CHECK(r[0] == doctest::Approx(std::log(std::exp(1.0) / (std::exp(1.0) + 1))));

  CHECK_THROWS_AS(LogSoftmax(std::vector<double>{0, std::nan("")}), Error);
}

TEST_CASE("exp(LogSoftmax) sums to one for random scores") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> s(1 + rng.UniformInt(1, 40));
    for (auto &v : s) v = rng.Uniform(-50, 50);
    auto lp = LogSoftmax(s);
    double total = 0;
    for (double v : lp) total += std::exp(v);
    CHECK(std::abs(total - 1) <= 1e-12);
  }
}

TEST_CASE("Tensor rejects bad shapes") {
  CHECK_THROWS_AS(Tensor<double>(std::vector<int64_t>{}), Error);
  CHECK_THROWS_AS(Tensor<double>({1, 1, 1, 1, 1}), Error);
  CHECK_THROWS_AS(Tensor<double>({2, 3}, std::vector<double>(5)), Error);
  Tensor<float> t({2, 3, 4});
  CHECK(t.NumElements() == 24);
  t(1, 2, 3) = 7;
  CHECK(t.Row(1, 2)[3] == 7);
}

namespace {

std::string TempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("bat_core_test_" + name))
      .string();
}

template <typename T>
Tensor<T> RandomTensor(Rng &rng, std::vector<int64_t> dims) {
  Tensor<T> t(std::move(dims));
  for (auto &v : t.Data()) {
    if constexpr (std::is_floating_point_v<T>)
      v = static_cast<T>(rng.Normal() * 1e3);
    else
      v = static_cast<T>(rng.NextU64());
  }
  return t;
}

}  // namespace

TEST_CASE("BAT1 round trip of a 2x3 f32 tensor is bit exact") {
  Tensor<float> t({2, 3}, {1.5f, -0.0f, 3.25f, 1e-30f, -7.0f, 42.0f});
  std::string path = TempPath("2x3.bat1");
  WriteTensor(path, t);
  auto back = std::get<Tensor<float>>(ReadTensor(path));
  CHECK(back.Dims() == t.Dims());
  CHECK(EncodeTensor(back) == EncodeTensor(t));
  std::filesystem::remove(path);
}

TEST_CASE("BAT1 header layout") {
  Tensor<double> t({1}, {1.0});
  std::string bytes = EncodeTensor(t);
  REQUIRE(bytes.size() == 4 + 4 + 1 + 1 + 8 + 8);
  CHECK(bytes.substr(0, 4) == "BAT1");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[8] == 1);  // f64
  CHECK(bytes[9] == 1);  // ndim
  CHECK(bytes[10] == 1);  // dims[0] LE
}

TEST_CASE("BAT1 round trip is bit exact for every dtype and ndim") {
  Rng rng(3);
  for (int ndim = 1; ndim <= 4; ++ndim) {
    std::vector<int64_t> dims(ndim);
    for (auto &d : dims) d = rng.UniformInt(0, 4);
    for (AnyTensor t : {AnyTensor(RandomTensor<float>(rng, dims)),
                        AnyTensor(RandomTensor<double>(rng, dims)),
                        AnyTensor(RandomTensor<int64_t>(rng, dims))}) {
      std::string bytes = EncodeTensor(t);
      AnyTensor back = DecodeTensor(bytes);
      CHECK(back.index() == t.index());
      CHECK(EncodeTensor(back) == bytes);
    }
  }
}

TEST_CASE("BAT1 decode errors") {
  std::string good = EncodeTensor(Tensor<double>({2, 2}, {1, 2, 3, 4}));

  auto code_of = [](const std::string &bytes) {
    try {
      DecodeTensor(bytes);
    } catch (const Error &e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(code_of(bad_magic) == ErrorCode::kBadMagic);
  CHECK(code_of("") == ErrorCode::kBadMagic);

  CHECK(code_of(good.substr(0, good.size() - 8)) ==
        ErrorCode::kTruncatedPayload);
  CHECK(code_of(good + "x") == ErrorCode::kTruncatedPayload);

  std::string bad_ndim = good;
  bad_ndim[9] = 5;
  CHECK(code_of(bad_ndim) == ErrorCode::kBadDims);
  std::string zero_ndim = good;
  zero_ndim[9] = 0;
  CHECK(code_of(zero_ndim) == ErrorCode::kBadDims);
}

TEST_CASE("Rng is reproducible and streams are independent of consumption") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.NextU64() == b.NextU64());

  Rng parent(7);
  Rng s1 = parent.Split(1);
  double first = s1.Uniform();
  parent.NextU64();
  CHECK(parent.Split(1).Uniform() == first);
  CHECK(parent.Split(2).Uniform() != first);

  Rng r(9);
  double sum = 0, sum_sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double z = r.Normal();
    sum += z;
    sum_sq += z * z;
    int64_t k = r.UniformInt(-2, 3);
    CHECK(k >= -2);
    CHECK(k <= 3);
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sum_sq / n - 1) < 0.05);
}

TEST_CASE("MemoryTracker tracks peak bytes") {
  MemoryTracker tracker;
  {
    TrackedBytes a(&tracker, 100);
    {
      TrackedBytes b(&tracker, 50);
      CHECK(tracker.Current() == 150);
    }
    TrackedBytes c(&tracker, 20);
    CHECK(tracker.Current() == 120);
  }
  CHECK(tracker.Current() == 0);
  CHECK(tracker.Peak() == 150);
  TrackedBytes none(nullptr, 1000);
  CHECK(tracker.Current() == 0);
}

}  // namespace bat
