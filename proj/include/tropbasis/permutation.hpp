#pragma once

// Permutations of {1..n} with canonical disjoint-cycle decompositions.
// Indices are 1-based throughout to match the usual matrix-index conventions.

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tropbasis {

class Permutation {
  public:
    Permutation() = default;

    // images[i-1] = sigma(i); must be a bijection on {1..n}.
    explicit Permutation(std::vector<int> images) : images_(std::move(images)) {
        std::vector<bool> seen(images_.size(), false);
        for (int v : images_) {
            if (v < 1 || v > static_cast<int>(images_.size()) || seen[v - 1])
                throw std::invalid_argument("permutation images are not a bijection");
            seen[v - 1] = true;
        }
    }

    static Permutation identity(int n) {
        std::vector<int> im(n);
        std::iota(im.begin(), im.end(), 1);
        return Permutation(std::move(im));
    }

    // Builds the permutation from disjoint cycles, e.g. {{1,2},{3,4,5}} on n.
    static Permutation from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
        std::vector<int> im(n);
        std::iota(im.begin(), im.end(), 1);
        for (const auto& cyc : cycles) {
            for (size_t k = 0; k < cyc.size(); ++k) {
                int from = cyc[k];
                int to = cyc[(k + 1) % cyc.size()];
                if (from < 1 || from > n) throw std::invalid_argument("cycle index out of range");
                im[from - 1] = to;
            }
        }
        return Permutation(std::move(im));
    }

    int size() const { return static_cast<int>(images_.size()); }
    int operator()(int i) const { return images_[i - 1]; }

    int inverse_of(int i) const {
        for (int k = 1; k <= size(); ++k)
            if (images_[k - 1] == i) return k;
        throw std::logic_error("inverse_of: unreachable");
    }

    Permutation inverse() const {
        std::vector<int> inv(images_.size());
        for (int i = 1; i <= size(); ++i) inv[images_[i - 1] - 1] = i;
        return Permutation(std::move(inv));
    }

    Permutation compose(const Permutation& other) const {  // this after other
        if (size() != other.size()) throw std::invalid_argument("size mismatch");
        std::vector<int> im(images_.size());
        for (int i = 1; i <= size(); ++i) im[i - 1] = (*this)(other(i));
        return Permutation(std::move(im));
    }

    // Conjugate by pi: returns pi * this * pi^-1 (relabels i as pi(i)).
    Permutation conjugate_by(const Permutation& pi) const {
        return pi.compose(this->compose(pi.inverse()));
    }

    // Canonical cycles: each rotated to start at its smallest element,
    // sorted by that element; fixed points omitted.
    std::vector<std::vector<int>> cycles() const {
        std::vector<std::vector<int>> out;
        std::vector<bool> seen(images_.size(), false);
        for (int i = 1; i <= size(); ++i) {
            if (seen[i - 1] || images_[i - 1] == i) continue;
            std::vector<int> cyc;
            int j = i;
            while (!seen[j - 1]) {
                seen[j - 1] = true;
                cyc.push_back(j);
                j = images_[j - 1];
            }
            out.push_back(std::move(cyc));
        }
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        return out;
    }

    // Cycle lengths >= 2, descending. Identity -> {}.
    std::vector<int> cycle_type() const {
        std::vector<int> t;
        for (const auto& c : cycles()) t.push_back(static_cast<int>(c.size()));
        std::sort(t.rbegin(), t.rend());
        return t;
    }

    bool contains_transposition() const {
        for (const auto& c : cycles())
            if (c.size() == 2) return true;
        return false;
    }

    std::string to_cycle_string() const {
        auto cyc = cycles();
        if (cyc.empty()) return "id";
        std::ostringstream os;
        for (const auto& c : cyc) {
            os << '(';
            for (size_t k = 0; k < c.size(); ++k) {
                if (k) os << ' ';
                os << c[k];
            }
            os << ')';
        }
        return os.str();
    }

    const std::vector<int>& images() const { return images_; }

    bool operator==(const Permutation& o) const { return images_ == o.images_; }
    bool operator<(const Permutation& o) const { return images_ < o.images_; }

    static void for_each(int n, const std::function<void(const Permutation&)>& fn) {
        std::vector<int> im(n);
        std::iota(im.begin(), im.end(), 1);
        do {
            fn(Permutation(im));
        } while (std::next_permutation(im.begin(), im.end()));
    }

  private:
    std::vector<int> images_;
};

}  // namespace tropbasis
