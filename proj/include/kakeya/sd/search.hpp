#pragma once

// Extremal search: the largest G over F_p (d = 1) with pi_{-1} injective and
// #pi_r(G) <= N for every r in R. G is encoded as one optional point per
// pi_{-1}-fiber; fiber c holds either (b + c, b) for a chosen b, or nothing.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "kakeya/config.hpp"

namespace kakeya {

enum class SearchMode { exhaustive, branch_and_bound };

inline std::string to_string(SearchMode m) {
    return m == SearchMode::exhaustive ? "exhaustive" : "branch_and_bound";
}

struct SearchResult {
    std::size_t max_size = 0;
    Config witness;
    bool exhaustive = true;
    std::uint64_t nodes_explored = 0;
    SearchMode mode = SearchMode::exhaustive;
    /// slopes actually searched (after Moebius canonicalization in branch-and-bound mode)
    std::vector<Slope> searched_slopes;
};

namespace detail {

constexpr std::int64_t kEmptyFiber = -1;

class FiberSearch {
public:
    FiberSearch(std::uint64_t p, const std::vector<Slope>& R, std::uint64_t N, std::uint64_t budget)
        : p_(p), N_(N), budget_(budget), counts_(R.size(), std::vector<std::uint32_t>(p, 0)), distinct_(R.size(), 0) {
        // pi_r(b + c, b) = c + (1 + r) b, and pi_inf = b
        for (const auto& r : R) {
            if (r.is_infinite())
                mult_.push_back({0, 1});
            else
                mult_.push_back({1, (1 + r.value().value()) % p});
        }
        choice_.assign(p, kEmptyFiber);
        best_choice_ = choice_;
    }

    /// Fixes a fiber before the search; returns false if the cap is violated.
    bool preset(std::uint64_t fiber, std::int64_t b) {
        if (b == kEmptyFiber) return true;
        if (!place(fiber, static_cast<std::uint64_t>(b))) return false;
        choice_[fiber] = b;
        ++size_;
        return true;
    }

    void run(std::uint64_t first_free) {
        best_size_ = size_;
        best_choice_ = choice_;
        dfs(first_free);
    }

    std::size_t best_size() const noexcept { return best_size_; }
    const std::vector<std::int64_t>& best_choice() const noexcept { return best_choice_; }
    std::uint64_t nodes() const noexcept { return nodes_; }
    bool complete() const noexcept { return !exhausted_; }

private:
    std::uint64_t value(std::size_t i, std::uint64_t fiber, std::uint64_t b) const {
        const auto [cf, cb] = mult_[i];
        return (cf * fiber + cb * b) % p_;
    }

    bool place(std::uint64_t fiber, std::uint64_t b) {
        std::size_t i = 0;
        bool ok = true;
        for (; i < mult_.size(); ++i) {
            auto& c = counts_[i][value(i, fiber, b)];
            if (c++ == 0 && ++distinct_[i] > N_) ok = false;
            if (!ok) {
                ++i;
                break;
            }
        }
        if (!ok) unplace_prefix(fiber, b, i);
        return ok;
    }

    void unplace_prefix(std::uint64_t fiber, std::uint64_t b, std::size_t upto) {
        for (std::size_t i = 0; i < upto; ++i)
            if (--counts_[i][value(i, fiber, b)] == 0) --distinct_[i];
    }

    void dfs(std::uint64_t fiber) {
        if (exhausted_) return;
        if (++nodes_ > budget_) {
            exhausted_ = true;
            return;
        }
        if (size_ > best_size_) {
            best_size_ = size_;
            best_choice_ = choice_;
        }
        if (fiber == p_) return;
        // every remaining fiber filled, or the N^2 product bound
        const std::uint64_t remaining = p_ - fiber;
        std::uint64_t bound = size_ + remaining;
        if (mult_.size() >= 2) bound = std::min<std::uint64_t>(bound, N_ * N_);
        if (bound <= best_size_) return;
        for (std::uint64_t b = 0; b < p_; ++b) {
            if (!place(fiber, b)) continue;
            choice_[fiber] = static_cast<std::int64_t>(b);
            ++size_;
            dfs(fiber + 1);
            --size_;
            choice_[fiber] = kEmptyFiber;
            unplace_prefix(fiber, b, mult_.size());
            if (exhausted_) return;
        }
        dfs(fiber + 1);
    }

    std::uint64_t p_;
    std::uint64_t N_;
    std::uint64_t budget_;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> mult_;
    std::vector<std::vector<std::uint32_t>> counts_;
    std::vector<std::uint64_t> distinct_;
    std::vector<std::int64_t> choice_;
    std::vector<std::int64_t> best_choice_;
    std::size_t size_ = 0;
    std::size_t best_size_ = 0;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
};

inline Config config_from_choice(const Space& z, const std::vector<std::int64_t>& choice) {
    std::vector<Point> pts;
    const auto p = z.p();
    for (std::uint64_t c = 0; c < choice.size(); ++c)
        if (choice[c] != kEmptyFiber) {
            const auto b = static_cast<std::uint64_t>(choice[c]);
            pts.push_back({ZElem{(b + c) % p}, ZElem{b}});
        }
    return Config(z, std::move(pts));
}

struct Branch {
    std::vector<std::pair<std::uint64_t, std::int64_t>> presets;
    std::uint64_t first_free = 0;
};

struct BranchOutcome {
    bool feasible = false;
    std::size_t size = 0;
    std::vector<std::int64_t> choice;
    std::uint64_t nodes = 0;
    bool complete = true;
};

/// Runs independent branches on up to `threads` workers; outcomes are stored
/// by branch index so the merge does not depend on scheduling.
inline std::vector<BranchOutcome> run_branches(std::uint64_t p, const std::vector<Slope>& R, std::uint64_t N,
                                               std::uint64_t budget, const std::vector<Branch>& branches,
                                               unsigned threads) {
    std::vector<BranchOutcome> out(branches.size());
    const std::uint64_t share = std::max<std::uint64_t>(1, budget / std::max<std::size_t>(1, branches.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < branches.size(); i = next++) {
            FiberSearch s(p, R, N, share);
            bool ok = true;
            for (const auto& [fiber, b] : branches[i].presets) ok = ok && s.preset(fiber, b);
            if (!ok) continue;
            s.run(branches[i].first_free);
            out[i] = {true, s.best_size(), s.best_choice(), s.nodes(), s.complete()};
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

/// The map L fixing -1 whose image L(R) is lexicographically least.
inline Moebius canonical_moebius(std::uint64_t p, const std::vector<Slope>& R) {
    const auto maps = all_moebius_fixing_minus_one(p);
    const Moebius* best = nullptr;
    std::vector<Slope> best_img;
    for (const auto& L : maps) {
        std::vector<Slope> img;
        for (const auto& r : R) img.push_back(L.apply(r));
        std::sort(img.begin(), img.end());
        if (!best || img < best_img) {
            best = &L;
            best_img = std::move(img);
        }
    }
    return *best;
}

}  // namespace detail

inline SearchResult extremal_search(std::uint64_t p, std::vector<Slope> R, std::uint64_t N,
                                    SearchMode mode = SearchMode::exhaustive, std::uint64_t seed = 0,
                                    std::uint64_t budget = 10'000'000, unsigned threads = 1) {
    (void)seed;  // the search is deterministic; the seed is echoed in reports only
    const Space z(p);
    if (N < 1) throw InvalidInput("cap N must be at least 1");
    for (const auto& r : R) {
        if (r.is_finite() && r.value().modulus() != p) throw ModulusMismatch(r.value().modulus(), p);
        if (!r.is_proper()) throw InvalidInput("slope " + to_string(r) + " is not proper");
    }
    std::sort(R.begin(), R.end());
    R.erase(std::unique(R.begin(), R.end()), R.end());

    SearchResult res;
    res.mode = mode;
    std::vector<Slope> searched = R;
    Moebius L = Moebius::identity(z.scalar(0));
    std::vector<detail::Branch> branches;
    if (mode == SearchMode::exhaustive) {
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(p); ++b) branches.push_back({{{0, b}}, 1});
        branches.push_back({{{0, detail::kEmptyFiber}}, 1});
    } else {
        // Translations fix one point at (0, 0); scalings move a second point into fiber 1.
        L = detail::canonical_moebius(p, R);
        searched.clear();
        for (const auto& r : R) searched.push_back(L.apply(r));
        std::sort(searched.begin(), searched.end());
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(p); ++b) branches.push_back({{{0, 0}, {1, b}}, 2});
    }
    res.searched_slopes = searched;

    const auto outcomes = detail::run_branches(p, searched, N, budget, branches, threads);
    const detail::BranchOutcome* best = nullptr;
    for (const auto& o : outcomes) {
        res.nodes_explored += o.nodes;
        res.exhaustive = res.exhaustive && o.complete;
        if (o.feasible && (!best || o.size > best->size)) best = &o;
    }
    Config witness;
    if (mode == SearchMode::branch_and_bound) {
        // a single point always fits under a cap N >= 1
        if (!best || best->size < 1) {
            witness = Config(z, {Point{ZElem{0}, ZElem{0}}});
        } else {
            witness = detail::config_from_choice(z, best->choice);
        }
        witness = transform_config(L.inverse(), witness);
    } else {
        witness = best ? detail::config_from_choice(z, best->choice) : Config(z, {});
    }
    res.max_size = witness.size();
    res.witness = std::move(witness);
    return res;
}

}  // namespace kakeya
