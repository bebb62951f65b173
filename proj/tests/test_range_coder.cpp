#include <random>

#include "doctest.h"
#include "lpcc/range_coder.hpp"

using namespace lpcc;

TEST_CASE("random bits over 64 contexts round-trip bit-exact") {
  std::mt19937_64 rng(42);
  const size_t n = 200000;
  std::vector<int> bits(n);
  std::vector<int> which(n);
  for (size_t i = 0; i < n; ++i) {
    which[i] = int(rng() % 64);
    // Context-dependent bias so adaptation matters.
    bits[i] = int(rng() % 100) < (20 + which[i]);
  }
  std::vector<uint8_t> out;
  BitContext enc_ctx[64], dec_ctx[64];
  RangeEncoder enc(out);
  for (size_t i = 0; i < n; ++i) enc.encode_bit(enc_ctx[which[i]], bits[i]);
  enc.flush();
  CHECK(double(out.size()) * 8 >= enc.bits());
  CHECK(double(out.size()) * 8 <= enc.bits() + 64);

  RangeDecoder dec(out.data(), out.size());
  for (size_t i = 0; i < n; ++i) CHECK(dec.decode_bit(dec_ctx[which[i]]) == bits[i]);
  CHECK(dec.consumed() == out.size());
  for (int k = 0; k < 64; ++k) CHECK(enc_ctx[k].p0 == dec_ctx[k].p0);
}

TEST_CASE("all-zero sequence compresses to the adaptation floor") {
  const size_t n = 100000;
  std::vector<uint8_t> out;
  BitContext ctx;
  RangeEncoder enc(out);
  for (size_t i = 0; i < n; ++i) enc.encode_bit(ctx, 0);
  enc.flush();
  // The probability state saturates 31/4096 short of certainty, costing
  // -log2(1 - 31/4096) ~ 0.011 bits per symbol at the floor.
  CHECK(double(out.size()) * 8 < double(n) * 0.013);
  BitContext dctx;
  RangeDecoder dec(out.data(), out.size());
  for (size_t i = 0; i < n; ++i) REQUIRE(dec.decode_bit(dctx) == 0);
  CHECK(dec.consumed() == out.size());
}

TEST_CASE("alternating bits stay near 1 bit per symbol") {
  const size_t n = 100000;
  std::vector<uint8_t> out;
  BitContext ctx;
  RangeEncoder enc(out);
  for (size_t i = 0; i < n; ++i) enc.encode_bit(ctx, int(i & 1));
  enc.flush();
  CHECK(double(out.size()) * 8 >= double(n) * 0.99);
}

TEST_CASE("bypass bits cost exactly one bit each") {
  std::vector<uint8_t> out;
  RangeEncoder enc(out);
  enc.encode_bypass_bits(0x2A5u, 10);
  CHECK(enc.bits() == doctest::Approx(10.0));
  enc.flush();
  RangeDecoder dec(out.data(), out.size());
  CHECK(dec.decode_bypass_bits(10) == 0x2A5u);
  CHECK(dec.consumed() == out.size());
}

TEST_CASE("exp-golomb round-trips exhaustively") {
  std::vector<uint8_t> out;
  RangeEncoder enc(out);
  for (uint64_t v = 0; v <= 10000; ++v) enc.encode_uint_eg(2, v);
  enc.flush();
  RangeDecoder dec(out.data(), out.size());
  for (uint64_t v = 0; v <= 10000; ++v) REQUIRE(dec.decode_uint_eg(2) == v);
  CHECK(dec.consumed() == out.size());
}

TEST_CASE("order-0 exp-golomb codes zero in one bit") {
  std::vector<uint8_t> out;
  RangeEncoder enc(out);
  enc.encode_uint_eg(0, 0);
  CHECK(enc.bits() == doctest::Approx(1.0));
}

TEST_CASE("zigzag mapping") {
  CHECK(RangeEncoder::zigzag(-3) == 5);
  CHECK(RangeEncoder::zigzag(0) == 0);
  CHECK(RangeEncoder::zigzag(1) == 2);
  for (int64_t v = -1000; v <= 1000; ++v)
    CHECK(RangeEncoder::unzigzag(RangeEncoder::zigzag(v)) == v);
}

TEST_CASE("signed and context-coded exp-golomb round-trip") {
  std::mt19937_64 rng(3);
  std::vector<int64_t> svals;
  std::vector<uint64_t> uvals;
  for (int i = 0; i < 5000; ++i) {
    svals.push_back(int64_t(rng() % 20001) - 10000);
    uvals.push_back(rng() % 100000);
  }
  std::vector<uint8_t> out;
  BitContext ectx[6], dctx[6];
  RangeEncoder enc(out);
  for (size_t i = 0; i < svals.size(); ++i) {
    enc.encode_sint_eg(1, svals[i]);
    enc.encode_uint_eg_ctx(2, uvals[i], ectx);
  }
  enc.flush();
  RangeDecoder dec(out.data(), out.size());
  for (size_t i = 0; i < svals.size(); ++i) {
    REQUIRE(dec.decode_sint_eg(1) == svals[i]);
    REQUIRE(dec.decode_uint_eg_ctx(2, dctx) == uvals[i]);
  }
  CHECK(dec.consumed() == out.size());
}

TEST_CASE("probe pass reports identical bits to the real emission") {
  std::mt19937_64 rng(17);
  std::vector<int> bits;
  for (int i = 0; i < 3000; ++i) bits.push_back(int(rng() % 10 > 2));

  auto run = [&](BitContext ctx) {
    std::vector<uint8_t> out;
    RangeEncoder enc(out);
    for (int b : bits) enc.encode_bit(ctx, b);
    enc.encode_uint_eg_ctx(2, 1234, std::span<BitContext>(&ctx, 1));
    return enc.bits();
  };
  BitContext seed;
  seed.p0 = 1000;
  CHECK(run(seed) == run(seed));
}

TEST_CASE("truncated stream raises DecodeError") {
  std::vector<uint8_t> out;
  BitContext ctx;
  RangeEncoder enc(out);
  for (int i = 0; i < 1000; ++i) enc.encode_bit(ctx, i % 3 == 0);
  enc.flush();
  RangeDecoder dec(out.data(), out.size() / 2);
  BitContext dctx;
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 1000; ++i) (void)dec.decode_bit(dctx);
      }(),
      DecodeError);
}
