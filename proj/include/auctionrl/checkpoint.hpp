#pragma once

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "auctionrl/experiment_id.hpp"
#include "auctionrl/mlp.hpp"
#include "auctionrl/policy.hpp"

namespace auctionrl {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Versioned text checkpoint. Weights are written as hexfloats so a load
// followed by a save reproduces the file byte for byte.
namespace checkpoint {

inline constexpr const char* kMagic = "auctionrl-checkpoint v1";

inline void write_mlp(std::ostream& os, const std::string& name, const Mlp& net) {
    os << "mlp " << name;
    for (int s : net.sizes()) os << ' ' << s;
    os << '\n' << std::hexfloat;
    for (const auto& layer : net.layers) {
        for (double v : layer.w.data) os << v << '\n';
        for (double v : layer.b) os << v << '\n';
    }
    os << std::defaultfloat;
}

inline Mlp read_mlp(std::istream& is, const std::string& expect_name) {
    std::string line;
    if (!std::getline(is, line)) throw CheckpointError("truncated checkpoint");
    std::istringstream header(line);
    std::string tag, name;
    header >> tag >> name;
    if (tag != "mlp" || name != expect_name)
        throw CheckpointError("expected mlp block '" + expect_name + "'");
    std::vector<int> sizes;
    int s;
    while (header >> s) sizes.push_back(s);
    if (sizes.size() < 2) throw CheckpointError("bad layer sizes");
    Mlp net;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Layer layer;
        layer.w = Matrix(sizes[l + 1], sizes[l]);
        layer.b.assign(sizes[l + 1], 0.0);
        net.layers.push_back(std::move(layer));
    }
    auto read_value = [&]() {
        if (!std::getline(is, line)) throw CheckpointError("truncated checkpoint");
        return std::strtod(line.c_str(), nullptr);
    };
    for (auto& layer : net.layers) {
        for (auto& v : layer.w.data) v = read_value();
        for (auto& v : layer.b) v = read_value();
    }
    return net;
}

struct Snapshot {
    ExperimentId id = ExperimentId::Seq1SP2;
    GaussianPolicy policy;
    Mlp q1, q2, q1_target, q2_target;
    double log_alpha = 0.0;
};

inline void save(std::ostream& os, const Snapshot& snap) {
    os << kMagic << '\n';
    os << "experiment " << to_string(snap.id) << '\n';
    os << "squash "
       << (snap.policy.squash == Squash::AffineTanh ? "affine-tanh" : "identity")
       << '\n';
    os << std::hexfloat;
    os << "squash_range " << snap.policy.lo << ' ' << snap.policy.hi << '\n';
    os << "action_dim " << snap.policy.action_dim << '\n';
    os << "log_alpha " << snap.log_alpha << '\n';
    os << std::defaultfloat;
    write_mlp(os, "policy", snap.policy.trunk);
    write_mlp(os, "q1", snap.q1);
    write_mlp(os, "q2", snap.q2);
    write_mlp(os, "q1_target", snap.q1_target);
    write_mlp(os, "q2_target", snap.q2_target);
}

inline Snapshot load(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kMagic)
        throw CheckpointError("not an auctionrl checkpoint");
    Snapshot snap;
    auto expect = [&](const std::string& key) {
        if (!std::getline(is, line)) throw CheckpointError("truncated checkpoint");
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k != key) throw CheckpointError("expected key '" + key + "'");
        return std::string(line.substr(key.size() + 1));
    };
    snap.id = experiment_from_string(expect("experiment"));
    const std::string squash = expect("squash");
    snap.policy.squash =
        squash == "affine-tanh" ? Squash::AffineTanh : Squash::Identity;
    {
        std::istringstream ls(expect("squash_range"));
        std::string a, b;
        ls >> a >> b;
        snap.policy.lo = std::strtod(a.c_str(), nullptr);
        snap.policy.hi = std::strtod(b.c_str(), nullptr);
    }
    snap.policy.action_dim = std::stoi(expect("action_dim"));
    snap.log_alpha = std::strtod(expect("log_alpha").c_str(), nullptr);
    snap.policy.trunk = read_mlp(is, "policy");
    snap.q1 = read_mlp(is, "q1");
    snap.q2 = read_mlp(is, "q2");
    snap.q1_target = read_mlp(is, "q1_target");
    snap.q2_target = read_mlp(is, "q2_target");
    return snap;
}

inline void save_file(const std::string& path, const Snapshot& snap) {
    std::ofstream os(path);
    if (!os) throw CheckpointError("cannot open checkpoint for writing: " + path);
    save(os, snap);
    if (!os) throw CheckpointError("write failure: " + path);
}

inline Snapshot load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CheckpointError("cannot open checkpoint: " + path);
    return load(is);
}

}  // namespace checkpoint

}  // namespace auctionrl
