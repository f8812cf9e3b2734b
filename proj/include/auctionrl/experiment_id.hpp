#pragma once

#include <stdexcept>
#include <string>

namespace auctionrl {

enum class ExperimentId {
    SplitTruthful2,       // 2 bidders, split-award, truthful opponent
    SplitEquilibrium3,    // 3 bidders, split-award, equilibrium opponents
    Seq1FP2,              // 2 bidders, 1 round, first price, equilibrium opponent
    Seq1SP2,              // 2 bidders, 1 round, second price, equilibrium opponent
    Seq2FPTruthful3,      // 3 bidders, 2 rounds, first price, truthful opponents
    Seq2FPEquilibrium3,   // 3 bidders, 2 rounds, first price, equilibrium opponents
};

inline std::string to_string(ExperimentId id) {
    switch (id) {
        case ExperimentId::SplitTruthful2: return "split-truthful-2";
        case ExperimentId::SplitEquilibrium3: return "split-equilibrium-3";
        case ExperimentId::Seq1FP2: return "seq-1fp-2";
        case ExperimentId::Seq1SP2: return "seq-1sp-2";
        case ExperimentId::Seq2FPTruthful3: return "seq-2fp-truthful-3";
        case ExperimentId::Seq2FPEquilibrium3: return "seq-2fp-equilibrium-3";
    }
    throw std::logic_error("unknown experiment id");
}

inline ExperimentId experiment_from_string(const std::string& s) {
    if (s == "split-truthful-2") return ExperimentId::SplitTruthful2;
    if (s == "split-equilibrium-3") return ExperimentId::SplitEquilibrium3;
    if (s == "seq-1fp-2") return ExperimentId::Seq1FP2;
    if (s == "seq-1sp-2") return ExperimentId::Seq1SP2;
    if (s == "seq-2fp-truthful-3") return ExperimentId::Seq2FPTruthful3;
    if (s == "seq-2fp-equilibrium-3") return ExperimentId::Seq2FPEquilibrium3;
    throw std::invalid_argument("unknown experiment id: " + s);
}

}  // namespace auctionrl
