#include "aos/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "doctest.h"

using namespace aos;

namespace {

DatasetMeta small_meta() {
  DatasetMeta m;
  m.scheme = "random";
  m.config_hash = "0123456789abcdef";
  m.seed = 5;
  m.feature_len = 3;
  m.actions = 4;
  m.scaler_mean = {0.1, 0.2};
  m.scaler_sd = {1.0, 2.0};
  return m;
}

Dataset small_dataset(int count, double u_value, const char* scheme = "random") {
  DatasetMeta meta = small_meta();
  meta.scheme = scheme;
  Dataset ds(meta);
  std::vector<double> s{0.1, 0.2, 0.3}, s2{0.4, 0.5, 0.6};
  for (int i = 0; i < count; ++i) {
    int a = i % 4;
    s[0] = 0.01 * i;
    ds.add(s, a == 0 ? 0 : 1, a == 0 ? 0 : a, u_value, s2);
  }
  return ds;
}

}  // namespace

TEST_CASE("records come back as they went in") {
  Dataset ds = small_dataset(8, 0.5);
  CHECK(ds.size() == 8);
  CHECK(ds.feature_len() == 3);
  CHECK(ds.s(3)[0] == 0.03);
  CHECK(ds.n(0) == 0);
  CHECK(ds.m(0) == 0);
  CHECK(ds.action(0) == 0);
  CHECK(ds.n(2) == 1);
  CHECK(ds.m(2) == 2);
  CHECK(ds.action(2) == 2);
  CHECK(ds.u(5) == 0.5);
  CHECK(ds.s2(7)[2] == 0.6);
  CHECK_NOTHROW(ds.validate());
}

TEST_CASE("validation rejects out-of-domain records") {
  {
    Dataset ds = small_dataset(2, 0.5);
    std::vector<double> s{0, 0, 0};
    ds.add(s, 0, 2, 0.5, s);  // idle slots cannot name a relay
    CHECK_THROWS_AS(ds.validate(), IoError);
  }
  {
    Dataset ds = small_dataset(2, 0.5);
    std::vector<double> s{0, 0, 0};
    ds.add(s, 1, 0, 0.5, s);  // sampling slots must name one
    CHECK_THROWS_AS(ds.validate(), IoError);
  }
  {
    Dataset ds = small_dataset(2, 0.5);
    std::vector<double> s{0, 0, 0};
    ds.add(s, 0, 0, 0.0, s);  // utility must stay in (0,1]
    CHECK_THROWS_AS(ds.validate(), IoError);
  }
  {
    Dataset ds = small_dataset(2, 0.5);
    std::vector<double> s{0, 0, 0};
    ds.add(s, 1, 9, 0.5, s);  // relay index beyond the action count
    CHECK_THROWS_AS(ds.validate(), IoError);
  }
}

TEST_CASE("dataset files round trip and fail closed") {
  const char* path = "ds_roundtrip.bin";
  Dataset ds = small_dataset(32, 0.75);
  save_dataset(ds, path);
  Dataset back = load_dataset(path);
  CHECK(back.size() == 32);
  CHECK(back.meta().scheme == "random");
  CHECK(back.meta().seed == 5);
  CHECK(back.meta().scaler_mean == ds.meta().scaler_mean);
  for (long i = 0; i < back.size(); ++i) {
    CHECK(back.u(i) == ds.u(i));
    CHECK(back.action(i) == ds.action(i));
    CHECK(back.s(i)[0] == ds.s(i)[0]);
  }

  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();

  std::string corrupt = bytes;
  corrupt[corrupt.size() - 20] ^= 0x01;
  {
    std::ofstream out(path, std::ios::binary);
    out.write(corrupt.data(), corrupt.size());
  }
  CHECK_THROWS_AS(load_dataset(path), IoError);

  {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), bytes.size() - 9);
  }
  CHECK_THROWS_AS(load_dataset(path), IoError);

  {
    std::ofstream out(path, std::ios::binary);
    out.write("BADMAGIC", 8);
  }
  CHECK_THROWS_AS(load_dataset(path), IoError);
  std::remove(path);
}

TEST_CASE("sampling without replacement is a partial permutation") {
  Rng rng(31);
  auto idx = sample_without_replacement(100, 40, rng);
  REQUIRE(idx.size() == 40);
  std::set<std::uint32_t> uniq(idx.begin(), idx.end());
  CHECK(uniq.size() == 40);
  for (auto i : idx) CHECK(i < 100);

  Rng r1(7), r2(7);
  CHECK(sample_without_replacement(50, 10, r1) ==
        sample_without_replacement(50, 10, r2));

  Rng r3(9);
  auto full = sample_without_replacement(20, 20, r3);
  std::set<std::uint32_t> all(full.begin(), full.end());
  CHECK(all.size() == 20);
}

TEST_CASE("mixing draws the requested expert share") {
  Dataset expert = small_dataset(400, 0.9, "expert");
  Dataset filler = small_dataset(400, 0.1);
  Rng rng(13);
  Dataset mixed = mix_datasets(expert, filler, 0.25, 200, rng);
  CHECK(mixed.size() == 200);
  CHECK(mixed.meta().scheme == "expert+random");
  long from_expert = 0;
  for (long i = 0; i < mixed.size(); ++i)
    if (mixed.u(i) == 0.9) ++from_expert;
  CHECK(from_expert == 50);
  CHECK_NOTHROW(mixed.validate());

  CHECK_THROWS_AS(mix_datasets(expert, filler, 1.0, 500, rng), StructuralError);
}
