#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "sham/container.hpp"
#include "test_helpers.hpp"

using namespace sham;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("sham_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

Container roundtrip(const Container& c) {
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    write_container(buf, c);
    return read_container(buf);
}

} // namespace

TEST_CASE("containers round-trip every format") {
    Rng gen(5150);
    for (int t = 0; t < 12; ++t) {
        const QuantMethod method = static_cast<QuantMethod>(1 + t % 4);
        const DenseMatrix W = test::pruned_quantized(3 + static_cast<Index>(gen.next_below(40)),
                                                     3 + static_cast<Index>(gen.next_below(40)),
                                                     t % 2 ? 75.0 : 0.0, method, 6, gen.next());
        const WordSize b = t % 3 ? WordSize::w32 : WordSize::w64;

        Container c;
        c.b = b;
        c.pipeline = {true, 75.0, static_cast<std::uint8_t>(method), true, 6, 42};

        c.matrix = to_ham(W, b);
        CHECK(bit_equal(reconstruct(roundtrip(c).matrix), W));

        c.matrix = to_sham(W, b);
        const Container rs = roundtrip(c);
        CHECK(bit_equal(reconstruct(rs.matrix), W));
        CHECK(rs.pipeline.p == 75.0);
        CHECK(rs.pipeline.seed == 42);
        CHECK(rs.pipeline.quant == static_cast<std::uint8_t>(method));

        c.matrix = to_csc(W);
        CHECK(bit_equal(reconstruct(roundtrip(c).matrix), W));

        c.matrix = to_index_map(W, codebook_from_matrix(W));
        CHECK(bit_equal(reconstruct(roundtrip(c).matrix), W));
    }
}

TEST_CASE("container bytes are deterministic") {
    const DenseMatrix W = test::example2();
    Container c;
    c.matrix = to_sham(W, WordSize::w32);
    std::stringstream a(std::ios::in | std::ios::out | std::ios::binary);
    std::stringstream b(std::ios::in | std::ios::out | std::ios::binary);
    write_container(a, c);
    write_container(b, c);
    CHECK(a.str() == b.str());
    CHECK(container_bytes(c) == a.str().size());
}

TEST_CASE("bad magic is rejected") {
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    buf << "NOPEnope";
    CHECK_THROWS_WITH_AS(read_container(buf), "corrupt container: bad magic", Error);
}

TEST_CASE("truncation is detected") {
    Container c;
    c.matrix = to_ham(test::example2(), WordSize::w32);
    std::ostringstream os(std::ios::binary);
    write_container(os, c);
    const std::string full = os.str();
    for (const std::size_t keep : {std::size_t{3}, std::size_t{20}, full.size() - 1}) {
        std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
        buf << full.substr(0, keep);
        CHECK_THROWS_AS(read_container(buf), Error);
    }
}

TEST_CASE("a flipped stream bit changes the decoded matrix or fails") {
    Container c;
    c.matrix = to_ham(test::example2(), WordSize::w32);
    std::ostringstream os(std::ios::binary);
    write_container(os, c);
    std::string bytes = os.str();

    // The stream words are the last section of a HAM payload; flip a bit in the
    // first stream word (8 bytes of bit_len precede the words at the tail).
    const auto& H = std::get<HamMatrix>(c.matrix);
    const std::size_t words_bytes = H.stream.words.size() * 4;
    const std::size_t first_word_off = bytes.size() - words_bytes;
    bytes[first_word_off + 3] = static_cast<char>(bytes[first_word_off + 3] ^ 0x01);

    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    buf << bytes;
    bool detected = false;
    try {
        const Container mangled = read_container(buf);
        detected = !bit_equal(reconstruct(mangled.matrix), test::example2());
    } catch (const Error& e) {
        detected = e.code() == Errc::corrupt_stream || e.code() == Errc::corrupt_container;
    }
    CHECK(detected);
}

TEST_CASE("dense matrix file io") {
    TempDir tmp;
    Rng gen(1);
    const DenseMatrix M = uniform_matrix(13, 7, -2.0f, 2.0f, gen);

    SUBCASE("raw round-trip is bit-exact") {
        save_dense_raw(tmp.file("m.f32"), M);
        CHECK(bit_equal(load_dense(tmp.file("m.f32")), M));
    }
    SUBCASE("csv round-trip is bit-exact at 9 significant digits") {
        save_dense_csv(tmp.file("m.csv"), M);
        CHECK(bit_equal(load_dense(tmp.file("m.csv")), M));
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_dense(tmp.file("absent.f32")), Error);
    }
    SUBCASE("ragged csv") {
        std::ofstream out(tmp.file("bad.csv"));
        out << "1,2,3\n1,2\n";
        out.close();
        CHECK_THROWS_AS(load_dense(tmp.file("bad.csv")), Error);
    }
}

TEST_CASE("save/load container files") {
    TempDir tmp;
    const DenseMatrix W = test::example2();
    Container c;
    c.matrix = to_sham(W, WordSize::w32);
    save_container(tmp.file("w.shamz"), c);
    CHECK(bit_equal(reconstruct(load_container(tmp.file("w.shamz")).matrix), W));
}
