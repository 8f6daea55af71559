#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace maredl::nn {

struct Array {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    std::size_t size() const { return data.size(); }
    double* ptr() { return data.data(); }
    const double* ptr() const { return data.data(); }
};

// Named weight arrays with stable insertion order (the order drives both
// deterministic initialization and the checkpoint layout).
class WeightStore {
  public:
    std::uint64_t seed = 0;

    Array& add(const std::string& name, std::vector<std::size_t> shape) {
        if (index_.count(name)) {
            throw std::invalid_argument("WeightStore: duplicate array " + name);
        }
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        index_[name] = entries_.size();
        entries_.push_back({name, Array{std::move(shape), std::vector<double>(n, 0.0)}});
        return entries_.back().second;
    }

    Array& at(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) {
            throw std::invalid_argument("WeightStore: missing array " + name);
        }
        return entries_[it->second].second;
    }
    const Array& at(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) {
            throw std::invalid_argument("WeightStore: missing array " + name);
        }
        return entries_[it->second].second;
    }
    bool has(const std::string& name) const { return index_.count(name) != 0; }

    std::vector<std::pair<std::string, Array>>& entries() { return entries_; }
    const std::vector<std::pair<std::string, Array>>& entries() const {
        return entries_;
    }

    WeightStore zeros_like() const {
        WeightStore out;
        out.seed = seed;
        for (const auto& [name, arr] : entries_) out.add(name, arr.shape);
        return out;
    }

    void fill(double v) {
        for (auto& [name, arr] : entries_) {
            for (double& x : arr.data) x = v;
        }
    }

  private:
    std::vector<std::pair<std::string, Array>> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

using Rng = std::mt19937_64;

// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))
void init_uniform(Array& a, std::size_t fan_in, Rng& rng);

// y += W x, W row-major (rows x cols)
void matvec_acc(const double* w, const double* x, double* y, std::size_t rows,
                std::size_t cols);
// dW += dy x^T
void outer_acc(double* dw, const double* dy, const double* x, std::size_t rows,
               std::size_t cols);
// dx += W^T dy
void matvec_t_acc(const double* w, const double* dy, double* dx, std::size_t rows,
                  std::size_t cols);

double softplus(double z);
double sigmoid(double z);

}  // namespace maredl::nn
