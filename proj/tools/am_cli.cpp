// Command-line front end: load a dataset and a test set, run either the
// classical engine or the gate-level simulator, and emit text or JSON
// reports, traces, and Monte Carlo summaries.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "am/circuit.hpp"
#include "am/dataset.hpp"
#include "am/engine.hpp"
#include "am/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParseError = 2;
constexpr int kExitNoPrediction = 3;

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

am::Rational parseRational(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        am::BigInt num(text.substr(0, slash));
        am::BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return am::Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return am::Rational(am::BigInt(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    am::BigInt den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    return am::Rational(am::BigInt(digits), den);
}

am::SelectionProperty parseProperty(const std::string& name) {
    using Kind = am::SelectionProperty::Kind;
    if (name == "homogeneity") return {Kind::Homogeneity};
    if (name == "nonplural-outcomes") return {Kind::NonpluralOutcomes};
    if (name == "nonplural-subcontexts") return {Kind::NonpluralSubcontexts};
    if (name == "occupied") return {Kind::Occupied};
    if (name == "singleton") return {Kind::Singleton};
    if (name == "distance-one") return {Kind::DistanceOne};
    throw std::invalid_argument("unknown property: " + name);
}

// Classical sampling draws outcomes from the exact pointer weights.
am::SampleResult sampleClassical(const am::Prediction& p, std::size_t samples,
                                 std::uint64_t seed) {
    am::SampleResult result;
    result.samples = samples;
    result.counts.assign(p.pointersByOutcome.size(), 0);
    result.exact = p.probabilities;
    if (!p.hasPrediction) return result;
    std::vector<std::uint64_t> weights;
    for (const auto& c : p.pointersByOutcome)
        weights.push_back(c.convert_to<std::uint64_t>());
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
    for (std::size_t i = 0; i < samples; ++i) ++result.counts[dist(rng)];
    return result;
}

nlohmann::json samplingJson(const am::SampleResult& s, const am::Dataset& ds) {
    nlohmann::json j;
    j["samples"] = s.samples;
    nlohmann::json counts, deviations;
    for (std::size_t w = 0; w < ds.outcomes.size(); ++w) {
        counts[ds.outcomes[w]] = s.counts[w];
        if (!s.exact.empty() && s.samples > 0) {
            am::Rational empirical(s.counts[w], s.samples);
            am::Rational dev = empirical > s.exact[w] ? empirical - s.exact[w]
                                                      : s.exact[w] - empirical;
            deviations[ds.outcomes[w]] = am::decimalString(dev, 6);
        }
    }
    j["counts"] = counts;
    if (!deviations.is_null()) j["absDeviation"] = deviations;
    return j;
}

void printSamplingText(std::ostream& out, const am::SampleResult& s,
                       const am::Dataset& ds) {
    out << "sampling (" << s.samples << " draws):";
    for (std::size_t w = 0; w < ds.outcomes.size(); ++w) {
        out << ' ' << ds.outcomes[w] << ':' << s.counts[w];
        if (!s.exact.empty() && s.samples > 0)
            out << " (exact " << am::decimalString(s.exact[w]) << ")";
    }
    out << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exemplar-based outcome prediction over all 2^n supracontexts"};

    std::string dataPath, testPath, engine = "classical", property = "homogeneity";
    std::string retainProbText = "1", tracePath;
    std::size_t trials = 1, samples = 0;
    std::uint64_t seed = 0;
    bool jsonOutput = false;

    app.add_option("--data", dataPath, "dataset file")->required();
    app.add_option("--test", testPath, "test set file")->required();
    app.add_option("--engine", engine, "classical | gates")
        ->check(CLI::IsMember({"classical", "gates"}));
    app.add_option("--property", property,
                   "supracontext selection property (classical engine only)");
    app.add_option("--retain-prob", retainProbText,
                   "imperfect-memory retention probability, e.g. 1/2");
    app.add_option("--trials", trials, "imperfect-memory Monte Carlo trials");
    app.add_option("--seed", seed, "random seed");
    app.add_flag("--json", jsonOutput, "machine-readable JSON report");
    app.add_option("--trace", tracePath, "write a gate-schedule trace (gates engine)");
    app.add_option("--samples", samples, "empirical one-stage measurement draws");

    CLI11_PARSE(app, argc, argv);

    am::Dataset ds;
    std::vector<am::TestItem> tests;
    am::SelectionProperty prop;
    am::Rational retainProb;
    try {
        prop = parseProperty(property);
        retainProb = parseRational(retainProbText);
        if (retainProb < 0 || retainProb > 1)
            throw std::invalid_argument("--retain-prob must be in [0, 1]");
        if (trials < 1) throw std::invalid_argument("--trials must be >= 1");
        if (prop.kind != am::SelectionProperty::Kind::Homogeneity &&
            engine != "classical")
            throw std::invalid_argument(
                "--property other than homogeneity requires --engine classical");
        if ((retainProb != 1 || trials > 1) && engine != "classical")
            throw std::invalid_argument(
                "imperfect memory requires --engine classical");
        ds = am::parseDataset(readFile(dataPath));
        tests = am::parseTestSet(readFile(testPath), ds.arity);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParseError;
    }

    const bool imperfectMemory = retainProb != 1 || trials > 1;
    std::ofstream traceFile;
    if (!tracePath.empty()) {
        traceFile.open(tracePath);
        if (!traceFile) {
            std::cerr << "error: cannot open trace file: " << tracePath << '\n';
            return kExitParseError;
        }
    }

    nlohmann::json jsonItems = nlohmann::json::array();
    bool anyNoPrediction = false;

    for (const auto& test : tests) {
        try {
            am::checkArity(test.given.features.size(), ds.arity);
            if (imperfectMemory) {
                auto mc = am::predictImperfectMemory(ds, test.given, retainProb,
                                                     trials, seed);
                anyNoPrediction = anyNoPrediction || !mc.hasMean;
                if (jsonOutput) {
                    nlohmann::json item;
                    item["given"] = test.given.features;
                    item["trials"] = trials;
                    item["noPredictionTrials"] = mc.noPredictionTrials;
                    if (mc.hasMean) {
                        nlohmann::json mean;
                        for (std::size_t w = 0; w < ds.outcomes.size(); ++w)
                            mean[ds.outcomes[w]] =
                                am::decimalString(mc.meanDistribution[w], 6);
                        item["meanProbabilities"] = mean;
                    } else {
                        item["noPrediction"] = true;
                    }
                    jsonItems.push_back(item);
                } else {
                    std::cout << "given:";
                    for (const auto& f : test.given.features) std::cout << ' ' << f;
                    std::cout << "\ntrials: " << trials
                              << "  no-prediction trials: " << mc.noPredictionTrials
                              << '\n';
                    if (mc.hasMean) {
                        std::cout << "mean probabilities:";
                        for (std::size_t w = 0; w < ds.outcomes.size(); ++w)
                            std::cout << ' ' << ds.outcomes[w] << " = "
                                      << am::decimalString(mc.meanDistribution[w], 6);
                        std::cout << '\n';
                    } else {
                        std::cout << "no prediction in any trial\n";
                    }
                    std::cout << '\n';
                }
                continue;
            }

            am::ItemResult result;
            am::SampleResult sampling;
            bool haveSampling = false;
            if (engine == "gates") {
                auto sched = am::runSchedule(ds, test.given, !tracePath.empty());
                result = am::fromSchedule(test.given, test.expected, sched);
                if (traceFile.is_open())
                    traceFile << am::traceDump(sched, {"C", "M", "N", "H", "A"});
                if (samples > 0) {
                    sampling = am::sampleOneStage(sched, samples, seed);
                    haveSampling = true;
                }
            } else {
                auto p = am::predictWithProperty(ds, test.given, prop);
                result = am::fromPrediction(test.given, test.expected, p);
                if (samples > 0) {
                    sampling = sampleClassical(p, samples, seed);
                    haveSampling = true;
                }
            }
            anyNoPrediction = anyNoPrediction || !result.hasPrediction;

            if (jsonOutput) {
                nlohmann::json item = am::toJson(result, ds);
                if (haveSampling) item["sampling"] = samplingJson(sampling, ds);
                jsonItems.push_back(item);
            } else {
                std::cout << am::toText(result, ds);
                if (haveSampling) printSamplingText(std::cout, sampling, ds);
                std::cout << '\n';
            }
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitParseError;
        }
    }

    if (jsonOutput) std::cout << jsonItems.dump(2) << '\n';
    return anyNoPrediction ? kExitNoPrediction : kExitOk;
}
