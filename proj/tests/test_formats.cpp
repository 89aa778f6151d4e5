#include "doctest.h"

#include <cmath>

#include "sham/formats.hpp"
#include "test_helpers.hpp"

using namespace sham;

TEST_CASE("csc golden vectors for the example matrix") {
    const CscMatrix C = to_csc(test::example2());
    CHECK(C.nz == std::vector<float>{1, 2, 10, 3, 4, 5, 6});
    CHECK(one_based_ri(C) == std::vector<std::uint64_t>{1, 3, 2, 3, 1, 3, 5});
    CHECK(one_based_cb(C) == std::vector<std::uint64_t>{1, 3, 5, 6, 6, 8});
    CHECK(bit_equal(from_csc(C), test::example2()));
}

TEST_CASE("csc of an all-zero matrix") {
    const CscMatrix C = to_csc(DenseMatrix::Zero(3, 4));
    CHECK(C.nz.empty());
    for (std::uint64_t v : C.cb) CHECK(v == 0);
    CHECK(bit_equal(from_csc(C), DenseMatrix::Zero(3, 4)));
}

TEST_CASE("dense 2x2 exceeds csc break-even") {
    const DenseMatrix M = test::matrix_from({{1, 2}, {3, 4}});
    const CscMatrix C = to_csc(M);
    const double psi = occupancy_ratio(
        static_cast<double>(accounting_bits(CompressedMatrix{C}, WordSize::w32)), 2, 2,
        WordSize::w32);
    CHECK(psi == doctest::Approx((8.0 + 3.0) / 4.0));
    CHECK(psi > 1.0);
}

TEST_CASE("ham of a constant matrix uses one bit per entry") {
    const DenseMatrix M = DenseMatrix::Constant(6, 7, 2.5f);
    const HamMatrix H = to_ham(M, WordSize::w32);
    CHECK(H.code.size() == 1);
    CHECK(H.stream.bit_len == 42);
    CHECK(bit_equal(from_ham(H), M));
}

TEST_CASE("ham round-trips the example matrix") {
    const HamMatrix H = to_ham(test::example2(), WordSize::w32);
    CHECK(H.code.size() == 8); // zeros are part of the code
    CHECK(bit_equal(from_ham(H), test::example2()));
}

TEST_CASE("sham encodes exactly the non-zeros of the example matrix") {
    const ShamMatrix S = to_sham(test::example2(), WordSize::w32);
    CHECK(S.code.size() == 7);
    CHECK(decode_all(S.stream, S.code).size() == 7);
    CHECK(one_based_ri({S.n, S.m, {}, S.ri, S.cb}) == std::vector<std::uint64_t>{1, 3, 2, 3, 1, 3, 5});
    CHECK(one_based_cb({S.n, S.m, {}, S.ri, S.cb}) == std::vector<std::uint64_t>{1, 3, 5, 6, 6, 8});
    CHECK(bit_equal(from_sham(S), test::example2()));
}

TEST_CASE("sham of an all-zero matrix has an empty stream") {
    const ShamMatrix S = to_sham(DenseMatrix::Zero(4, 5), WordSize::w32);
    CHECK(S.stream.bit_len == 0);
    CHECK(S.code.size() == 0);
    CHECK(bit_equal(from_sham(S), DenseMatrix::Zero(4, 5)));
}

TEST_CASE("index map round-trip and sizing") {
    Rng gen(17);
    DenseMatrix M = uniform_matrix(12, 9, -1.0f, 1.0f, gen);
    Rng qrng(3);
    const QuantResult q = quantize_cws(M, 5, qrng, false);
    const IndexMapMatrix I = to_index_map(q.W, q.codebook);
    CHECK(I.index_bits == 8);
    CHECK(bit_equal(from_index_map(I), q.W));
    const std::uint64_t bits = accounting_bits(CompressedMatrix{I}, WordSize::w32);
    CHECK(bits == 8ull * 12 * 9 + 5ull * 32);
}

TEST_CASE("index map maps pruned sentinels to a zero center") {
    const DenseMatrix M = test::matrix_from({{0, 1}, {2, 0}});
    Rng rng(5);
    const QuantResult q = quantize_cws(M, 2, rng, true); // zeros excluded, sentinels present
    const IndexMapMatrix I = to_index_map(q.W, q.codebook);
    CHECK(I.centers.size() == 3); // two centers plus the appended zero
    CHECK(bit_equal(from_index_map(I), q.W));
}

TEST_CASE("index map single-center codebook") {
    const DenseMatrix M = DenseMatrix::Constant(3, 3, 4.0f);
    const IndexMapMatrix I = to_index_map(M, codebook_from_matrix(M));
    CHECK(I.centers.size() == 1);
    for (std::uint16_t idx : I.indices) CHECK(idx == 0);
    CHECK(bit_equal(from_index_map(I), M));
}

TEST_CASE("index map rejects mismatched codebooks") {
    const DenseMatrix M = test::matrix_from({{1, 2}, {3, 4}});
    Codebook cb = codebook_from_matrix(M);
    cb.centers[0] = 9.0f;
    CHECK_THROWS_AS(to_index_map(M, cb), Error);
}

TEST_CASE("index map occupancy matches the closed form") {
    // psi = b_bar/b + k/(nm)
    const double psi256 =
        bound_bits(FormatTag::imap, 4096, 4096, 1.0, 256, WordSize::w32,
                   BoundHypothesis::k_distinct) /
        (32.0 * 4096 * 4096);
    CHECK(psi256 == doctest::Approx(8.0 / 32.0 + 256.0 / (4096.0 * 4096.0)).epsilon(1e-12));
    CHECK(psi256 == doctest::Approx(0.25).epsilon(1e-4));

    const double psi2 = bound_bits(FormatTag::imap, 4096, 4096, 1.0, 2, WordSize::w32,
                                   BoundHypothesis::k_distinct) /
                        (32.0 * 4096 * 4096);
    CHECK(psi2 == doctest::Approx(0.25).epsilon(1e-4)); // byte-rounded even for k=2
}

TEST_CASE("ham bound examples") {
    // psi bound = (1+log2 k)/b + 6k/(nm)
    const double bits =
        bound_bits(FormatTag::ham, 4096, 4096, 1.0, 32, WordSize::w32, BoundHypothesis::k_distinct);
    const double psi = bits / (32.0 * 4096 * 4096);
    CHECK(psi == doctest::Approx((1.0 + 5.0) / 32.0 + 6.0 * 32.0 / (4096.0 * 4096.0)).epsilon(1e-12));
    CHECK(psi == doctest::Approx(0.18751).epsilon(1e-4));
}

TEST_CASE("sham bound example") {
    const double bits = bound_bits(FormatTag::sham, 4096, 4096, 0.01, 32, WordSize::w32,
                                   BoundHypothesis::k_distinct);
    const double psi = bits / (32.0 * 4096 * 4096);
    const double expect =
        0.01 * 6.0 / 32.0 + (192.0 + 4097.0) / (4096.0 * 4096.0) + 0.01;
    CHECK(psi == doctest::Approx(expect).epsilon(1e-12));
    CHECK(psi == doctest::Approx(0.01213).epsilon(1e-3));
}

TEST_CASE("hypothesis coincidence at s=1, k=nm") {
    const Index n = 64, m = 32;
    const double worst =
        bound_bits(FormatTag::ham, n, m, 1.0, 64 * 32, WordSize::w32, BoundHypothesis::worst_case);
    const double kdist =
        bound_bits(FormatTag::ham, n, m, 1.0, 64 * 32, WordSize::w32, BoundHypothesis::k_distinct);
    CHECK(worst == doctest::Approx(kdist).epsilon(1e-9)); // 6nmb == 6kb when k = nm

    const double sworst =
        bound_bits(FormatTag::sham, n, m, 1.0, 64 * 32, WordSize::w32, BoundHypothesis::worst_case);
    const double skdist =
        bound_bits(FormatTag::sham, n, m, 1.0, 64 * 32, WordSize::w32, BoundHypothesis::k_distinct);
    CHECK(sworst == doctest::Approx(skdist).epsilon(1e-9)); // 7snm == 6k + snm when k = snm
}

TEST_CASE("crossover examples") {
    CHECK(crossover_s(32, WordSize::w32, 4096, 4096) == doctest::Approx(0.15768).epsilon(1e-3));
    CHECK(crossover_s(2, WordSize::w32, 1 << 15, 1 << 15) == doctest::Approx(0.0588).epsilon(1e-2));
    // (m+1)/(nm) >= (1+log2 k)/b makes the numerator non-positive
    CHECK(crossover_s(2, WordSize::w32, 2, 2) <= 0.0);
}

TEST_CASE("bound satisfaction on quantized matrices") {
    Rng gen(2718);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseMatrix W = test::pruned_quantized(
            20 + static_cast<Index>(gen.next_below(60)), 20 + static_cast<Index>(gen.next_below(60)),
            trial % 2 ? 80.0 : 0.0, QuantMethod::cws, 2 + static_cast<int>(gen.next_below(15)),
            gen.next());
        const SparsityStats st = stats(W);

        const HamMatrix H = to_ham(W, WordSize::w32);
        const SpaceReport hr = make_space_report(CompressedMatrix{H}, WordSize::w32, st);
        CHECK(static_cast<double>(hr.actual_bits) <= std::ceil(hr.bound_bits));

        const ShamMatrix S = to_sham(W, WordSize::w32);
        if (S.code.size() >= 1) {
            const SpaceReport sr = make_space_report(CompressedMatrix{S}, WordSize::w32, st);
            CHECK(static_cast<double>(sr.actual_bits) <= std::ceil(sr.bound_bits));
        }
    }
}

TEST_CASE("lossless round-trips over random pruned/quantized matrices") {
    Rng gen(1234);
    for (int trial = 0; trial < 30; ++trial) {
        const QuantMethod method = static_cast<QuantMethod>(1 + trial % 4);
        const DenseMatrix W =
            test::pruned_quantized(2 + static_cast<Index>(gen.next_below(50)),
                                   2 + static_cast<Index>(gen.next_below(50)),
                                   trial % 3 ? 70.0 : 0.0, method, 8, gen.next());
        CHECK(bit_equal(from_ham(to_ham(W, WordSize::w32)), W));
        CHECK(bit_equal(from_sham(to_sham(W, WordSize::w64)), W));
        CHECK(bit_equal(from_csc(to_csc(W)), W));
        CHECK(bit_equal(from_index_map(to_index_map(W, codebook_from_matrix(W))), W));
    }
}
