#ifndef TESTS_HELPERS_HPP
#define TESTS_HELPERS_HPP

#include <random>
#include <string>

#include "am/dataset.hpp"
#include "am/engine.hpp"

namespace helpers {

// The six-item term-of-address data set used throughout the golden tests.
inline std::string addressText() {
    return "y o m s\n"
           "x g f a\n"
           "x c m s\n"
           "x c m a\n"
           "x o m n\n"
           "x g f r\n";
}

inline am::Dataset addressDataset() { return am::parseDataset(addressText()); }

inline am::GivenContext given(std::initializer_list<const char*> features) {
    am::GivenContext g;
    for (const char* f : features) g.features.emplace_back(f);
    return g;
}

// Eight items covering every combination of two binary features with both
// outcomes; only the fully specified supracontext is homogeneous for "p q".
inline am::Dataset pq8Dataset() {
    return am::parseDataset(
        "x o q\n"
        "y o q\n"
        "x o r\n"
        "y o r\n"
        "x p q\n"
        "y p q\n"
        "x p r\n"
        "y p r\n");
}

// Just the two "p q" items; every supracontext is homogeneous.
inline am::Dataset pq2Dataset() {
    return am::parseDataset(
        "x p q\n"
        "y p q\n");
}

inline am::Rational probOf(const am::Dataset& ds, const am::Prediction& p,
                           const std::string& label) {
    return p.probabilities.at(ds.outcomeIndex(label));
}

inline am::BigInt pointersOf(const am::Dataset& ds, const am::Prediction& p,
                             const std::string& label) {
    return p.pointersByOutcome.at(ds.outcomeIndex(label));
}

struct RandomInstance {
    am::Dataset ds;
    am::GivenContext given;
};

// A small random problem: n <= 6 features over a three-symbol alphabet,
// m <= 12 items, up to three outcomes.
inline RandomInstance randomInstance(std::mt19937_64& rng) {
    static const char* symbols[] = {"a", "b", "c"};
    static const char* outcomes[] = {"x", "y", "z"};
    std::uniform_int_distribution<std::size_t> nDist(1, 6), mDist(1, 12),
        kDist(1, 3), symDist(0, 2);
    std::size_t n = nDist(rng), m = mDist(rng), k = kDist(rng);
    std::uniform_int_distribution<std::size_t> outDist(0, k - 1);

    std::string text;
    for (std::size_t j = 0; j < m; ++j) {
        text += outcomes[outDist(rng)];
        for (std::size_t i = 0; i < n; ++i) {
            text += ' ';
            text += symbols[symDist(rng)];
        }
        text += '\n';
    }
    RandomInstance inst;
    inst.ds = am::parseDataset(text);
    for (std::size_t i = 0; i < n; ++i)
        inst.given.features.emplace_back(symbols[symDist(rng)]);
    return inst;
}

} // namespace helpers

#endif
