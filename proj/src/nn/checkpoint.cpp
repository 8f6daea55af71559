#include "maredl/nn/checkpoint.hpp"

#include <bit>
#include <cstring>

#include <json.hpp>

namespace maredl::nn {

namespace {

constexpr char kMagic[8] = {'E', 'D', 'L', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
  public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    void expect_magic() {
        if (bytes_.size() < 8 || std::memcmp(bytes_.data(), kMagic, 8) != 0) {
            throw std::runtime_error("checkpoint: bad magic or version");
        }
        pos_ = 8;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(
                     static_cast<unsigned char>(bytes_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(std::uint64_t len) {
        need(len);
        std::string s = bytes_.substr(pos_, len);
        pos_ += len;
        return s;
    }
    void done() const {
        if (pos_ != bytes_.size()) {
            throw std::runtime_error("checkpoint: trailing bytes");
        }
    }

  private:
    void need(std::uint64_t n) const {
        if (n > bytes_.size() - pos_) {
            throw std::runtime_error("checkpoint: truncated file");
        }
    }
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string save_checkpoint(const WeightStore& weights,
                            const std::string& descriptor) {
    std::string out;
    out.append(kMagic, 8);
    put_u64(out, descriptor.size());
    out += descriptor;
    put_u64(out, weights.entries().size());
    for (const auto& [name, arr] : weights.entries()) {
        put_u64(out, name.size());
        out += name;
        put_u64(out, arr.shape.size());
        for (std::size_t d : arr.shape) put_u64(out, d);
        for (double v : arr.data) put_f64(out, v);
    }
    return out;
}

std::pair<WeightStore, std::string> load_checkpoint(const std::string& bytes) {
    Reader r(bytes);
    r.expect_magic();
    const std::string descriptor = r.str(r.u64());
    const std::uint64_t count = r.u64();
    WeightStore w;
    for (std::uint64_t a = 0; a < count; ++a) {
        const std::string name = r.str(r.u64());
        const std::uint64_t rank = r.u64();
        if (rank > 8) throw std::runtime_error("checkpoint: implausible rank");
        std::vector<std::size_t> shape(rank);
        std::uint64_t n = 1;
        for (auto& d : shape) {
            d = r.u64();
            n *= d;
        }
        if (n > (1ull << 32)) throw std::runtime_error("checkpoint: implausible size");
        Array& arr = w.add(name, shape);
        for (std::uint64_t i = 0; i < n; ++i) arr.data[i] = r.f64();
    }
    r.done();
    return {std::move(w), descriptor};
}

namespace {

using nlohmann::json;

void check_shapes(const WeightStore& expected, const WeightStore& actual) {
    if (expected.entries().size() != actual.entries().size()) {
        throw std::runtime_error("checkpoint: array set does not match the spec");
    }
    for (const auto& [name, arr] : expected.entries()) {
        if (!actual.has(name) || actual.at(name).shape != arr.shape) {
            throw std::runtime_error("checkpoint: shape mismatch for " + name);
        }
    }
}

}  // namespace

std::string save_regressor_checkpoint(const RegressorSpec& spec,
                                      const WeightStore& weights) {
    json d;
    d["kind"] = "regressor";
    d["n_in"] = spec.n_in;
    d["n_out"] = spec.n_out;
    d["hidden"] = spec.hidden;
    d["layers"] = spec.layers;
    d["dropout"] = spec.dropout;
    d["T"] = spec.T;
    d["L"] = spec.L;
    d["head"] =
        spec.head == RegressorSpec::Head::Evidential ? "evidential" : "mean_sigma";
    d["seed"] = weights.seed;
    return save_checkpoint(weights, d.dump());
}

std::pair<RegressorSpec, WeightStore> load_regressor_checkpoint(
    const std::string& bytes) {
    auto [weights, descriptor] = load_checkpoint(bytes);
    json d = json::parse(descriptor);
    if (d.value("kind", "") != "regressor") {
        throw std::runtime_error("checkpoint: not a regressor checkpoint");
    }
    RegressorSpec spec;
    spec.n_in = d.at("n_in").get<std::size_t>();
    spec.n_out = d.at("n_out").get<std::size_t>();
    spec.hidden = d.at("hidden").get<std::size_t>();
    spec.layers = d.at("layers").get<std::size_t>();
    spec.dropout = d.at("dropout").get<double>();
    spec.T = d.at("T").get<std::size_t>();
    spec.L = d.at("L").get<std::size_t>();
    const std::string head = d.at("head").get<std::string>();
    if (head == "evidential") {
        spec.head = RegressorSpec::Head::Evidential;
    } else if (head == "mean_sigma") {
        spec.head = RegressorSpec::Head::MeanSigma;
    } else {
        throw std::runtime_error("checkpoint: unknown head " + head);
    }
    weights.seed = d.value("seed", 0ull);
    check_shapes(init_regressor(spec, 0), weights);
    return {spec, std::move(weights)};
}

std::string save_classifier_checkpoint(const ClassifierSpec& spec,
                                       const WeightStore& weights) {
    json d;
    d["kind"] = "classifier";
    d["T"] = spec.T;
    d["n_in"] = spec.n_in;
    d["hidden"] = spec.hidden;
    d["hidden_layers"] = spec.hidden_layers;
    d["k"] = spec.k;
    d["seed"] = weights.seed;
    return save_checkpoint(weights, d.dump());
}

std::pair<ClassifierSpec, WeightStore> load_classifier_checkpoint(
    const std::string& bytes) {
    auto [weights, descriptor] = load_checkpoint(bytes);
    json d = json::parse(descriptor);
    if (d.value("kind", "") != "classifier") {
        throw std::runtime_error("checkpoint: not a classifier checkpoint");
    }
    ClassifierSpec spec;
    spec.T = d.at("T").get<std::size_t>();
    spec.n_in = d.at("n_in").get<std::size_t>();
    spec.hidden = d.at("hidden").get<std::size_t>();
    spec.hidden_layers = d.at("hidden_layers").get<std::size_t>();
    spec.k = d.at("k").get<std::size_t>();
    weights.seed = d.value("seed", 0ull);
    check_shapes(init_classifier(spec, 0), weights);
    return {spec, std::move(weights)};
}

std::string checkpoint_kind(const std::string& bytes) {
    auto [weights, descriptor] = load_checkpoint(bytes);
    return json::parse(descriptor).value("kind", "");
}

}  // namespace maredl::nn
