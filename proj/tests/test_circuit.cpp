#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "am/circuit.hpp"
#include "helpers.hpp"

using namespace am;

namespace {

// One branch with the named auxiliary registers, for operator-level tests.
BranchedState singleBranch(std::initializer_list<Register> regs) {
    BranchedState st;
    st.branches.emplace_back();
    for (const auto& r : regs) st.branches.front().add(r.name, r.kind, r.bits);
    return st;
}

Bits randomBits(std::mt19937_64& rng, std::size_t width) {
    Bits b(width);
    for (std::size_t i = 0; i < width; ++i) b.set(i, rng() & 1u);
    return b;
}

const Bits& reg(const BranchedState& st, const std::string& name) {
    return st.branches.front().at(name).bits;
}

} // namespace

TEST_CASE("RegisterFile rejects duplicates and unknown names") {
    RegisterFile rf;
    rf.add("S", RegKind::Substantive, Bits::zeros(3));
    REQUIRE_THROWS_AS(rf.add("S", RegKind::Auxiliary, Bits::zeros(3)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(rf.at("T"), std::invalid_argument);
    REQUIRE(rf.has("S"));
    REQUIRE_FALSE(rf.has("T"));
}

TEST_CASE("fundamental gates act on single bits and broadcast registers") {
    RegisterFile rf;
    rf.add("A", RegKind::Substantive, Bits::fromString("1010"));
    rf.add("B", RegKind::Substantive, Bits::fromString("0110"));
    rf.add("T", RegKind::Substantive, Bits::fromString("0000"));

    SECTION("NOT on one bit") {
        REQUIRE(applyGateToFile(rf, Gate::Not({"T", 2})) == 1);
        REQUIRE(rf.at("T").bits == Bits::fromString("0010"));
    }
    SECTION("broadcast NOT counts one application per index") {
        REQUIRE(applyGateToFile(rf, Gate::Not({"T"})) == 4);
        REQUIRE(rf.at("T").bits == Bits::fromString("1111"));
    }
    SECTION("broadcast CNOT xors the control into the target") {
        applyGateToFile(rf, Gate::Cnot({"A"}, {"T"}));
        REQUIRE(rf.at("T").bits == Bits::fromString("1010"));
    }
    SECTION("broadcast CCNOT fires where both controls are one") {
        applyGateToFile(rf, Gate::Ccnot({"A"}, {"B"}, {"T"}));
        REQUIRE(rf.at("T").bits == Bits::fromString("0010"));
    }
    SECTION("single-bit CCNOT with mixed operands") {
        applyGateToFile(rf, Gate::Ccnot({"A", 0}, {"B", 1}, {"T", 3}));
        REQUIRE(rf.at("T").bits == Bits::fromString("0001"));
    }
}

TEST_CASE("gates refuse invalid operands") {
    RegisterFile rf;
    rf.add("K", RegKind::Constant, Bits::fromString("101"));
    rf.add("T", RegKind::Substantive, Bits::fromString("000"));
    rf.add("W", RegKind::Substantive, Bits::fromString("0000"));

    REQUIRE_THROWS_AS(applyGateToFile(rf, Gate::Not({"K"})), std::logic_error);
    REQUIRE_NOTHROW(applyGateToFile(rf, Gate::Not({"K"}), true));
    REQUIRE_THROWS_AS(applyGateToFile(rf, Gate::Cnot({"K"}, {"W"})),
                      std::invalid_argument);  // width mismatch
    REQUIRE_THROWS_AS(applyGateToFile(rf, Gate::Cnot({"T"}, {"T"})),
                      std::logic_error);  // alias
    REQUIRE_THROWS_AS(applyGateToFile(rf, Gate::Cnot({"T", 1}, {"T", 1})),
                      std::logic_error);
    REQUIRE_NOTHROW(applyGateToFile(rf, Gate::Cnot({"T", 1}, {"T", 2})));
    REQUIRE_THROWS_AS(applyGateToFile(rf, Gate::Not({"T", 9})),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(applyGateToFile(rf, Gate::Cnot({"K", 7}, {"T", 0})),
                      std::invalid_argument);
}

TEST_CASE("COMPARE zeroes exactly the differing positions") {
    // ASCII 'o' = 01101111 and 'g' = 01100111 differ in one bit.
    auto st = singleBranch({
        {"A", RegKind::Constant, Bits::fromString("01101111")},
        {"B", RegKind::Constant, Bits::fromString("01100111")},
        {"X", RegKind::Auxiliary, Bits::ones(8)},
    });
    compare(st, "A", "B", "X");
    REQUIRE(reg(st, "X") == Bits::fromString("11110111"));
    REQUIRE(reg(st, "A") == Bits::fromString("01101111"));
    REQUIRE(reg(st, "B") == Bits::fromString("01100111"));
    compareInverse(st, "A", "B", "X");
    REQUIRE(reg(st, "X") == Bits::ones(8));
}

TEST_CASE("ONES raises the top bit only when the source is all ones") {
    SECTION("X = 11001 leaves the carry chain short") {
        auto st = singleBranch({
            {"X", RegKind::Substantive, Bits::fromString("11001")},
            {"Y", RegKind::Auxiliary, Bits::zeros(6)},
        });
        ones(st, "X", "Y");
        REQUIRE(reg(st, "Y") == Bits::fromString("111000"));

        SECTION("reversed-order replay restores Y") {
            onesInverse(st, "X", "Y");
            REQUIRE(reg(st, "Y") == Bits::zeros(6));
        }
        SECTION("same-order replay fails to restore Y") {
            ones(st, "X", "Y");
            REQUIRE(reg(st, "Y") == Bits::fromString("010000"));
            REQUIRE(reg(st, "Y") != Bits::zeros(6));
        }
    }
    SECTION("X all ones carries through to the last bit") {
        auto st = singleBranch({
            {"X", RegKind::Substantive, Bits::ones(4)},
            {"Y", RegKind::Auxiliary, Bits::zeros(5)},
        });
        ones(st, "X", "Y");
        REQUIRE(reg(st, "Y").test(4));
        REQUIRE(reg(st, "Y") == Bits::ones(5));
    }
}

TEST_CASE("IDENTITY reports equality in the top result bit") {
    auto run = [](const std::string& a, const std::string& b) {
        auto st = singleBranch({
            {"A", RegKind::Constant, Bits::fromString(a)},
            {"B", RegKind::Constant, Bits::fromString(b)},
            {"X", RegKind::Auxiliary, Bits::ones(a.size())},
            {"Y", RegKind::Auxiliary, Bits::zeros(a.size() + 1)},
        });
        identityTest(st, "A", "B", "X", "Y");
        bool equal = reg(st, "Y").test(a.size());
        identityTestInverse(st, "A", "B", "X", "Y");
        REQUIRE(reg(st, "X") == Bits::ones(a.size()));
        REQUIRE(reg(st, "Y") == Bits::zeros(a.size() + 1));
        return equal;
    };
    REQUIRE(run("01101111", "01101111"));
    REQUIRE_FALSE(run("01101111", "01100111"));
    REQUIRE_FALSE(run("0000", "1111"));
}

TEST_CASE("derived operators invert exactly on random contents") {
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<std::size_t> widthDist(1, 16);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t w = widthDist(rng);
        auto st = singleBranch({
            {"A", RegKind::Constant, randomBits(rng, w)},
            {"B", RegKind::Constant, randomBits(rng, w)},
            {"X", RegKind::Auxiliary, randomBits(rng, w)},
            {"Y", RegKind::Auxiliary, randomBits(rng, w + 1)},
        });
        const Bits x0 = reg(st, "X"), y0 = reg(st, "Y");

        compare(st, "A", "B", "X");
        compareInverse(st, "A", "B", "X");
        REQUIRE(reg(st, "X") == x0);

        ones(st, "X", "Y");
        onesInverse(st, "X", "Y");
        REQUIRE(reg(st, "X") == x0);
        REQUIRE(reg(st, "Y") == y0);

        identityTest(st, "A", "B", "X", "Y");
        identityTestInverse(st, "A", "B", "X", "Y");
        REQUIRE(reg(st, "X") == x0);
        REQUIRE(reg(st, "Y") == y0);
    }
}

TEST_CASE("difference vectors are built by the gate machinery") {
    Dataset ds = helpers::addressDataset();
    auto given = helpers::given({"o", "m", "a"});
    auto enc = SymbolEncoding::build(ds).withSymbols(given.features);
    auto built = buildDifferenceVectors(ds, given, enc);
    const char* expected[] = {"001", "110", "101", "100", "001", "111"};
    REQUIRE(built.diffs.size() == 6);
    for (std::size_t j = 0; j < 6; ++j)
        REQUIRE(built.diffs[j] == Bits::fromString(expected[j]));
    REQUIRE(built.diffs[1] == Bits::fromString("110"));  // g f a vs o m a
    REQUIRE(built.gateCount > 0);

    SECTION("the gate route agrees with the symbolic route everywhere") {
        std::mt19937_64 rng(9001);
        for (int trial = 0; trial < 30; ++trial) {
            auto inst = helpers::randomInstance(rng);
            auto e = SymbolEncoding::build(inst.ds).withSymbols(inst.given.features);
            auto b = buildDifferenceVectors(inst.ds, inst.given, e);
            auto symbolic = differenceVectors(inst.ds, inst.given);
            for (std::size_t j = 0; j < symbolic.size(); ++j)
                REQUIRE(b.diffs[j] == diffBits(symbolic[j], inst.ds.arity));
        }
    }
}

TEST_CASE("schedule registers match the worked tables for o m a") {
    Dataset ds = helpers::addressDataset();
    auto r = runSchedule(ds, helpers::given({"o", "m", "a"}));
    REQUIRE(r.state.branches.size() == 8);

    const char* expectedC[] = {"000000", "100010", "000000", "000100",
                               "100010", "101110", "010100", "111111"};
    const char* expectedP[] = {"111", "111", "111", "111",
                               "111", "010", "101", "000"};
    int expectedM[] = {0, 0, 0, 0, 0, 1, 1, 1};
    int expectedQ[] = {1, 0, 1, 1, 0, 0, 1, 0};
    int expectedN[] = {0, 1, 0, 0, 1, 1, 0, 1};
    int expectedH[] = {1, 1, 1, 1, 1, 0, 1, 0};
    const char* expectedA[] = {"000000", "100010", "000000", "000100",
                               "100010", "000000", "010100", "000000"};

    for (std::size_t l = 0; l < 8; ++l) {
        CAPTURE(l);
        const RegisterFile& rf = r.state.branches[l];
        REQUIRE(rf.at("C").bits == Bits::fromString(expectedC[l]));
        REQUIRE(rf.at("P").bits == Bits::fromString(expectedP[l]));
        REQUIRE(rf.at("M").bits.test(0) == bool(expectedM[l]));
        REQUIRE(rf.at("Q").bits.test(0) == bool(expectedQ[l]));
        REQUIRE(rf.at("N").bits.test(0) == bool(expectedN[l]));
        REQUIRE(rf.at("H").bits.test(0) == bool(expectedH[l]));
        REQUIRE(rf.at("A").bits == Bits::fromString(expectedA[l]));
    }
}

TEST_CASE("schedule leaves recycled auxiliaries and constants untouched") {
    Dataset ds = helpers::addressDataset();
    auto r = runSchedule(ds, helpers::given({"o", "m", "a"}));
    const char* expectedD[] = {"001", "110", "101", "100", "001", "111"};
    const char* expectedF[] = {"100010", "101110", "010100"};
    for (const auto& rf : r.state.branches) {
        REQUIRE(rf.at("W").bits == Bits::ones(3));
        REQUIRE(rf.at("Z").bits == Bits::zeros(4));
        REQUIRE(rf.at("X").bits == Bits::ones(6));
        REQUIRE(rf.at("Y").bits == Bits::zeros(7));
        REQUIRE(rf.at("Upsilon").bits == Bits::zeros(2));
        for (std::size_t j = 0; j < 6; ++j)
            REQUIRE(rf.at("D" + std::to_string(j + 1)).bits ==
                    Bits::fromString(expectedD[j]));
        for (std::size_t i = 0; i < 3; ++i)
            REQUIRE(rf.at("F" + std::to_string(i + 1)).bits ==
                    Bits::fromString(expectedF[i]));
        REQUIRE(rf.at("Omega1").bits == Bits::fromString("011111"));
    }
}

TEST_CASE("gate engine agrees with the classical engine on random instances") {
    std::mt19937_64 rng(60601);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = helpers::randomInstance(rng);
        auto sched = runSchedule(inst.ds, inst.given);
        auto analyses = analyzeAll(inst.ds, inst.given);
        REQUIRE(sched.state.branches.size() == analyses.size());
        for (std::size_t l = 0; l < analyses.size(); ++l) {
            const auto& a = analyses[l];
            const auto& rf = sched.state.branches[l];
            REQUIRE(sched.state.masks[l] == a.mask);
            REQUIRE(rf.at("C").bits == a.contained);
            REQUIRE(rf.at("M").bits.test(0) == a.pluralSubcontexts);
            REQUIRE(rf.at("N").bits.test(0) == a.pluralOutcomes);
            REQUIRE(rf.at("H").bits.test(0) == a.homogeneous);
            std::size_t ampCount = rf.at("A").bits.popcount();
            REQUIRE(ampCount == (a.homogeneous ? a.total : 0));
        }
        auto dist = outcomeDistribution(sched);
        auto p = predict(inst.ds, inst.given);
        REQUIRE(dist.has_value() == p.hasPrediction);
        if (dist) REQUIRE(*dist == p.probabilities);
    }
}

TEST_CASE("outcome distribution from amplitudes") {
    Dataset ds = helpers::addressDataset();
    auto r = runSchedule(ds, helpers::given({"o", "m", "a"}));
    auto dist = outcomeDistribution(r);
    REQUIRE(dist.has_value());
    REQUIRE((*dist)[ds.outcomeIndex("x")] == Rational(9, 13));
    REQUIRE((*dist)[ds.outcomeIndex("y")] == Rational(4, 13));
}

TEST_CASE("one- and two-stage measurement are deterministic and in range") {
    Dataset ds = helpers::addressDataset();
    auto r = runSchedule(ds, helpers::given({"o", "m", "a"}));

    std::mt19937_64 a(7), b(7);
    for (int i = 0; i < 200; ++i) {
        auto oa = measureOneStage(r, a);
        auto ob = measureOneStage(r, b);
        REQUIRE(oa.has_value());
        REQUIRE(oa == ob);
        REQUIRE(*oa < ds.outcomes.size());
    }
    std::mt19937_64 c(7);
    for (int i = 0; i < 200; ++i) {
        auto two = measureTwoStage(r, c);
        REQUIRE(two.has_value());
        // Only branches with nonzero amplitude can be observed.
        REQUIRE((two->first == 0b110 || two->first == 0b011 ||
                 two->first == 0b100 || two->first == 0b001));
        REQUIRE(two->second < ds.outcomes.size());
    }
}

TEST_CASE("per-branch gate counts are deterministic and grow with the data") {
    Dataset ds = helpers::addressDataset();
    auto r1 = runSchedule(ds, helpers::given({"o", "m", "a"}));
    auto r2 = runSchedule(ds, helpers::given({"o", "m", "a"}));
    REQUIRE(r1.state.perBranchGateCount == r2.state.perBranchGateCount);
    REQUIRE(r1.diffGateCount == r2.diffGateCount);

    Dataset doubled = parseDataset(helpers::addressText() + helpers::addressText());
    auto r3 = runSchedule(doubled, helpers::given({"o", "m", "a"}));
    REQUIRE(r3.state.perBranchGateCount > r1.state.perBranchGateCount);
}

TEST_CASE("trace capture snapshots each phase") {
    Dataset ds = helpers::addressDataset();
    auto r = runSchedule(ds, helpers::given({"o", "m", "a"}), true);
    REQUIRE(r.trace.size() == 5);
    REQUIRE(r.trace[0].name == "after inclusion");
    REQUIRE(r.trace[4].name == "after amplitude");

    // M starts high everywhere and drops at the feature-plurality phase
    // exactly where the features are invariant.
    REQUIRE(r.trace[0].branches[0].at("M").bits.test(0));
    REQUIRE(r.trace[0].branches[5].at("M").bits.test(0));
    REQUIRE_FALSE(r.trace[1].branches[0].at("M").bits.test(0));
    REQUIRE(r.trace[1].branches[5].at("M").bits.test(0));
    // H flips only at the homogeneity step.
    REQUIRE(r.trace[2].branches[5].at("H").bits.test(0));
    REQUIRE_FALSE(r.trace[3].branches[5].at("H").bits.test(0));

    std::string dump = traceDump(r, {"C", "H"});
    REQUIRE(dump.find("after inclusion\t111\tC\t000000\n") != std::string::npos);
    REQUIRE(dump.find("after homogeneity\t010\tH\t0\n") != std::string::npos);
    REQUIRE(dump.find("after amplitude\t110\tC\t100010\n") != std::string::npos);
}

TEST_CASE("runSchedule validates arity and the branch cap") {
    Dataset ds = helpers::addressDataset();
    REQUIRE_THROWS_AS(runSchedule(ds, helpers::given({"o", "m"})),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(runSchedule(ds, helpers::given({"o", "m", "a"}), false, 2),
                      std::length_error);
}
