#include "bnp/audit.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>

#include "bnp/errors.hpp"
#include "bnp/pool_index.hpp"

namespace bnp {

namespace {

constexpr const char* kFakeUserBidder = "!fake-user";

bool scenario_precedes(const DeviationScenario& a, const DeviationScenario& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    if (a.actor != b.actor) return a.actor < b.actor;
    if (a.altered_bids != b.altered_bids) return a.altered_bids < b.altered_bids;
    const auto key = [](const Bid& bid) { return std::pair(bid.tx_id, bid.amount); };
    return std::lexicographical_compare(
        a.injected_bids.begin(), a.injected_bids.end(), b.injected_bids.begin(),
        b.injected_bids.end(),
        [&](const Bid& x, const Bid& y) { return key(x) < key(y); });
}

// Running optimum with the canonical tie-break, so every search path returns
// the same witness for the same space.
struct BestTracker {
    bool any = false;
    Payoff best = 0;
    DeviationScenario scenario;
    Payoff clearing_delta = 0;

    void offer(Payoff delta, const DeviationScenario& candidate, Payoff candidate_clearing_delta) {
        if (any && delta < best) return;
        if (any && delta == best && !scenario_precedes(candidate, scenario)) return;
        any = true;
        best = delta;
        scenario = candidate;
        clearing_delta = candidate_clearing_delta;
    }

    [[nodiscard]] AuditFinding finding(Payoff tolerance) const {
        AuditFinding f;
        if (any) {
            f.best_delta = best;
            f.violating = best > tolerance;
            f.witness = scenario;
            f.witness_clearing_delta = clearing_delta;
        }
        return f;
    }

    void merge(const BestTracker& other) {
        if (other.any) offer(other.best, other.scenario, other.clearing_delta);
    }
};

// Clearing shift of the winning witness via a materialized auction. Only used
// on paths whose per-candidate scoring does not already expose the deviated
// clearing (naive drivers, multi-member coalitions); one extra auction run is
// noise next to the enumeration that produced the witness.
void finalize_clearing(AuditFinding& f, const Mempool& pool, const AuctionParams& params) {
    if (!f.witness) return;
    Mempool deviated = pool;
    for (Bid& bid : deviated.bids) {
        const auto it = f.witness->altered_bids.find(bid.tx_id);
        if (it != f.witness->altered_bids.end()) bid.amount = it->second;
    }
    for (const Bid& bid : f.witness->injected_bids) deviated.bids.push_back(bid);
    f.witness_clearing_delta = as_payoff(run_auction(deviated, params).clearing_price) -
                               as_payoff(run_auction(pool, params).clearing_price);
}

Amount pool_max_amount(const Mempool& pool) {
    Amount max_amount = 0;
    for (const Bid& bid : pool.bids) max_amount = std::max(max_amount, bid.amount);
    return max_amount;
}

bool is_abstract(const FutureCostModel& model) {
    return model.kind != FutureCostModel::Kind::NextRoundRealized;
}

// Everything the incremental scorers need about the honest pool.
struct FastContext {
    const Mempool* pool;
    AuctionParams params;
    PoolIndex index;
    Amount b_n;
    Amount b_2n;
    Amount max_amount;
    Amount fee;  // abstract b' off the honest ordering
    // Owner -> number of that owner's bids inside the honest top n.
    std::unordered_map<std::string, std::uint32_t> owner_included;

    FastContext(const Mempool& p, const AuctionParams& pr, const AuditConfig& config)
        : pool(&p), params(pr), index(p, pr) {
        b_n = index.stat(pr.n);
        b_2n = index.stat(2 * pr.n);
        max_amount = pool_max_amount(p);
        if (config.future_model.kind == FutureCostModel::Kind::FixedOffset)
            fee = b_2n + config.future_model.offset;
        else
            fee = b_n;  // pessimistic
        const std::size_t winners = std::min(p.bids.size(), pr.n);
        for (std::size_t pos = 0; pos < winners; ++pos)
            owner_included[p.bids[index.bid_at(pos)].bidder_id]++;
    }

    [[nodiscard]] const Bid& bid_at_pos(std::size_t pos) const {
        return pool->bids[index.bid_at(pos)];
    }
};

// Exact delta for re-pricing the bid at index bid_idx to v, against the
// two-round scoring under an abstract future model: the actor is the bid's
// owner, so sibling bids' clearing changes and boundary promotions count.
Payoff fast_replace_delta(const FastContext& ctx, std::size_t bid_idx, Amount v,
                          Amount* clearing_out = nullptr) {
    const Bid& bid = ctx.pool->bids[bid_idx];
    const std::size_t n = ctx.params.n;
    const std::size_t p = ctx.index.position_of(bid_idx);
    const bool incl_h = p < n;
    const Amount c_h = ctx.b_n;
    const Payoff fee = as_payoff(ctx.fee);
    const Payoff tv = as_payoff(*bid.true_value);

    const PoolIndex::EditEval ev = ctx.index.eval_replace(p, v);
    const Amount c_d = ev.clearing;
    if (clearing_out) *clearing_out = c_d;

    const Payoff own_h = incl_h ? tv - as_payoff(c_h) : tv - fee;
    const Payoff own_d = ev.included ? tv - as_payoff(c_d) : tv - fee;

    auto it = ctx.owner_included.find(bid.bidder_id);
    std::uint32_t sib_incl = (it == ctx.owner_included.end() ? 0 : it->second);
    if (incl_h) --sib_incl;

    Payoff flip = 0;
    std::int64_t both_included = sib_incl;
    if (incl_h && !ev.included) {
        // Deviator leaves the top n; the honest (n+1)-th bid is promoted.
        const Bid& promoted = ctx.bid_at_pos(n);
        if (promoted.bidder_id == bid.bidder_id) flip = fee - as_payoff(c_d);
    } else if (!incl_h && ev.included) {
        // Deviator enters the top n; the honest n-th bid is demoted.
        const Bid& demoted = ctx.bid_at_pos(n - 1);
        if (demoted.bidder_id == bid.bidder_id) {
            flip = as_payoff(c_h) - fee;
            --both_included;
        }
    }

    const Payoff shared = both_included * (as_payoff(c_h) - as_payoff(c_d));
    return (own_d - own_h) + shared + flip;
}

// Exact delta for a value-less extra bid from a bidder owning nothing else.
Payoff fast_fake_user_delta(const FastContext& ctx, Amount v, const std::string& fake_id,
                            Amount* clearing_out = nullptr) {
    const PoolIndex::EditEval ev = ctx.index.eval_inject(v, fake_id);
    if (clearing_out) *clearing_out = ev.clearing;
    return ev.included ? -as_payoff(ev.clearing) : -as_payoff(ctx.fee);
}

// Exact miner delta for a fake bid at v (reject v < b_2n upstream).
Payoff fast_miner_fake_delta(const FastContext& ctx, Amount v, const std::string& fake_id,
                             Amount* clearing_out = nullptr) {
    const PoolIndex::EditEval ev = ctx.index.eval_inject(v, fake_id);
    if (clearing_out) *clearing_out = ev.clearing;
    const Payoff revenue_delta =
        static_cast<Payoff>(ev.window) - static_cast<Payoff>(ctx.index.window_sum());
    const Payoff fake_cost = ev.included ? as_payoff(ev.clearing) : as_payoff(ctx.fee);
    return revenue_delta - fake_cost;
}

// Exact coalition delta for raising the eligible bid at bid_idx to r: miner
// revenue change plus the member owner's bid payoffs.
Payoff fast_raise_delta(const FastContext& ctx, std::size_t bid_idx, Amount r,
                        Amount* clearing_out = nullptr) {
    const Bid& bid = ctx.pool->bids[bid_idx];
    const std::size_t n = ctx.params.n;
    const std::size_t p = ctx.index.position_of(bid_idx);
    const Amount c_h = ctx.b_n;
    const Payoff fee = as_payoff(ctx.fee);

    const PoolIndex::EditEval ev = ctx.index.eval_replace(p, r);
    const Amount c_d = ev.clearing;
    if (clearing_out) *clearing_out = c_d;

    const Payoff revenue_delta =
        static_cast<Payoff>(ev.window) - static_cast<Payoff>(ctx.index.window_sum());
    // tv cancels between worlds; only the fee side of the member's own bid moves.
    const Payoff own = ev.included ? fee - as_payoff(c_d) : 0;

    auto it = ctx.owner_included.find(bid.bidder_id);
    std::int64_t both_included = (it == ctx.owner_included.end() ? 0 : it->second);

    Payoff flip = 0;
    if (ev.included) {
        const Bid& demoted = ctx.bid_at_pos(n - 1);
        if (demoted.bidder_id == bid.bidder_id) {
            flip = as_payoff(c_h) - fee;
            --both_included;
        }
    }
    const Payoff shared = both_included * (as_payoff(c_h) - as_payoff(c_d));
    return revenue_delta + own + shared + flip;
}

template <std::size_t N>
struct CandidateSet {
    std::array<Amount, N> values{};
    std::size_t count = 0;

    void add(Amount v) {
        for (std::size_t i = 0; i < count; ++i)
            if (values[i] == v) return;
        values[count++] = v;
    }
    void add_around(Amount v, Amount floor = 0) {
        if (v > floor) add(v - 1);
        add(v);
        add(v + 1);
    }
};

DeviationScenario replace_scenario(const Bid& bid, Amount v, std::uint64_t round) {
    DeviationScenario s;
    s.kind = bid.true_value && v > *bid.true_value ? DeviationKind::Overbid : DeviationKind::Underbid;
    s.actor = bid.bidder_id;
    s.altered_bids[bid.tx_id] = v;
    s.round = round;
    return s;
}

DeviationScenario fake_user_scenario(Amount v, std::uint64_t round) {
    DeviationScenario s;
    s.kind = DeviationKind::FakeUserBid;
    s.actor = kFakeUserBidder;
    s.injected_bids.push_back(
        {make_fake_tx_id(0), kFakeUserBidder, v, std::nullopt, BidOrigin::Genuine});
    s.round = round;
    return s;
}

DeviationScenario miner_fake_scenario(Amount v, std::uint64_t round) {
    DeviationScenario s;
    s.kind = DeviationKind::MinerFakeBid;
    s.actor = "miner";
    s.injected_bids.push_back({make_fake_tx_id(0), "miner", v, std::nullopt, BidOrigin::MinerFake});
    s.round = round;
    return s;
}

DeviationScenario raise_scenario(const std::vector<std::pair<const Bid*, Amount>>& members,
                                 std::uint64_t round) {
    DeviationScenario s;
    s.kind = DeviationKind::Collusion;
    s.actor = "coalition";
    for (const auto& [bid, amount] : members) s.altered_bids[bid->tx_id] = amount;
    s.round = round;
    return s;
}

void require_true_values(const Mempool& pool) {
    for (const Bid& bid : pool.bids)
        if (!bid.true_value)
            throw MissingTrueValueError("bid lacks true_value needed for the audit: " + bid.tx_id);
}

}  // namespace

std::vector<Amount> deviation_grid(const Mempool& pool, const AuditConfig& config) {
    std::vector<Amount> grid;
    if (config.grid == GridKind::AllPivotPoints) {
        grid.push_back(0);
        for (const Bid& bid : pool.bids) {
            if (bid.amount > 0) grid.push_back(bid.amount - 1);
            grid.push_back(bid.amount);
            grid.push_back(bid.amount + 1);
        }
    } else {
        if (config.step == 0) throw ValidationError("uniform grid step must be at least 1");
        const Amount max_amount = pool_max_amount(pool);
        for (Amount v = 0; v <= max_amount; v += config.step) grid.push_back(v);
        grid.push_back((max_amount / config.step + 1) * config.step);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

bool witness_precedes(const DeviationScenario& a, const DeviationScenario& b) {
    return scenario_precedes(a, b);
}

std::vector<SampledDeviation> sample_deviations(const Mempool& pool, const AuditConfig& config,
                                                std::uint64_t block_number) {
    std::vector<SampledDeviation> samples;
    if (pool.bids.empty() || config.sample_count == 0) return samples;

    std::mt19937_64 rng(config.seed * 0x9E3779B97F4A7C15ULL + block_number);
    std::uniform_int_distribution<std::size_t> pick_bid(0, pool.bids.size() - 1);
    std::uniform_int_distribution<Amount> pick_amount(0, pool_max_amount(pool) + 1);

    for (std::uint64_t i = 0; i < config.sample_count; ++i) {
        for (int attempt = 0; attempt < 16; ++attempt) {
            const Bid& bid = pool.bids[pick_bid(rng)];
            const Amount v = pick_amount(rng);
            if (bid.true_value && v == *bid.true_value) continue;
            samples.push_back({bid.tx_id, v});
            break;
        }
    }
    return samples;
}

namespace detail {

AuditFinding naive_audit_uic(const Mempool& pool, const AuctionParams& params,
                             const AuditConfig& config, const ScenarioEvaluator& evaluate) {
    if (pool.bids.empty()) return {};
    require_true_values(pool);

    const std::vector<Amount> grid = deviation_grid(pool, config);
    const std::uint64_t cost =
        static_cast<std::uint64_t>(pool.bids.size() + 1) * grid.size();
    if (cost > config.max_evals) throw InfeasibleSearchError(cost, config.max_evals);
    BestTracker best;
    for (const Bid& bid : pool.bids) {
        for (const Amount v : grid) {
            if (v == *bid.true_value) continue;  // honest bid, not a deviation
            DeviationScenario s = replace_scenario(bid, v, pool.round);
            const ScenarioResult r = evaluate(pool, s, params, config.future_model);
            best.offer(r.delta, s, 0);
        }
    }
    for (const Amount v : grid) {
        DeviationScenario s = fake_user_scenario(v, pool.round);
        const ScenarioResult r = evaluate(pool, s, params, config.future_model);
        best.offer(r.delta, s, 0);
    }
    AuditFinding f = best.finding(config.tolerance);
    finalize_clearing(f, pool, params);
    return f;
}

AuditFinding naive_audit_mic(const Mempool& pool, const AuctionParams& params,
                             const AuditConfig& config, const ScenarioEvaluator& evaluate) {
    if (pool.bids.empty()) return {};

    PoolIndex index(pool, params);
    const Amount floor = index.stat(2 * params.n);
    const std::vector<Amount> grid = deviation_grid(pool, config);
    if (grid.size() > config.max_evals) throw InfeasibleSearchError(grid.size(), config.max_evals);
    BestTracker best;
    for (const Amount v : grid) {
        if (v < floor) continue;  // dominated, rejected by the evaluator
        DeviationScenario s = miner_fake_scenario(v, pool.round);
        const ScenarioResult r = evaluate(pool, s, params, config.future_model);
        best.offer(r.delta, s, 0);
    }
    AuditFinding f = best.finding(config.tolerance);
    finalize_clearing(f, pool, params);
    return f;
}

AuditFinding naive_audit_scp(const Mempool& pool, const AuctionParams& params, std::size_t c,
                             const AuditConfig& config, const ScenarioEvaluator& evaluate) {
    AuditFinding mic = naive_audit_mic(pool, params, config, evaluate);
    if (pool.bids.empty() || c == 0) return mic;
    require_true_values(pool);

    PoolIndex index(pool, params);
    const Amount b_n = index.stat(params.n);
    std::vector<const Bid*> eligible;
    for (const Bid& bid : pool.bids)
        if (bid.amount < b_n) eligible.push_back(&bid);
    std::sort(eligible.begin(), eligible.end(),
              [](const Bid* a, const Bid* b) { return a->tx_id < b->tx_id; });

    const std::vector<Amount> grid = deviation_grid(pool, config);
    const std::uint64_t cost = naive_scp_eval_count(eligible.size(), grid.size(), c);
    if (cost > config.max_evals) throw InfeasibleSearchError(cost, config.max_evals);

    BestTracker best;
    if (mic.witness) best.offer(mic.best_delta, *mic.witness, mic.witness_clearing_delta);

    // Subsets of size 1..c, every member raised to any grid amount >= its bid.
    std::vector<std::size_t> subset;
    std::vector<std::pair<const Bid*, Amount>> members;
    const std::function<void(std::size_t)> assign = [&](std::size_t depth) {
        if (depth == subset.size()) {
            bool all_noop = true;
            for (const auto& [bid, amount] : members)
                if (amount != bid->amount) all_noop = false;
            if (all_noop) return;  // raising everyone to their own bid is honest play
            DeviationScenario s = raise_scenario(members, pool.round);
            const ScenarioResult r = evaluate(pool, s, params, config.future_model);
            best.offer(r.delta, s, 0);
            return;
        }
        const Bid* bid = eligible[subset[depth]];
        for (const Amount v : grid) {
            if (v < bid->amount) continue;
            members.emplace_back(bid, v);
            assign(depth + 1);
            members.pop_back();
        }
    };
    const std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t start,
                                                                     std::size_t remaining) {
        if (remaining == 0) {
            assign(0);
            return;
        }
        for (std::size_t i = start; i + remaining <= eligible.size(); ++i) {
            subset.push_back(i);
            choose(i + 1, remaining - 1);
            subset.pop_back();
        }
    };
    for (std::size_t size = 1; size <= std::min(c, eligible.size()); ++size) choose(0, size);

    AuditFinding f = best.finding(config.tolerance);
    finalize_clearing(f, pool, params);
    return f;
}

std::uint64_t naive_scp_eval_count(std::size_t eligible, std::size_t grid, std::size_t c) {
    long double total = static_cast<long double>(grid);  // the mic sweep
    long double combos = 1.0L;
    for (std::size_t size = 1; size <= std::min(c, eligible); ++size) {
        combos = combos * static_cast<long double>(eligible - size + 1) / static_cast<long double>(size);
        long double per = combos;
        for (std::size_t j = 0; j < size; ++j) per *= static_cast<long double>(grid);
        total += per;
        if (total > 1e18L) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(total);
}

}  // namespace detail

namespace {

AuditFinding fast_audit_uic(const FastContext& ctx, const AuditConfig& config) {
    const Mempool& pool = *ctx.pool;
    const std::size_t n = ctx.params.n;
    BestTracker best;

    for (std::size_t i = 0; i < pool.bids.size(); ++i) {
        const Bid& bid = pool.bids[i];
        const std::size_t p = ctx.index.position_of(i);
        const Amount o_n = ctx.index.stat_without(p, n);
        const Amount o_nm1 = n >= 2 ? ctx.index.stat_without(p, n - 1) : 0;

        CandidateSet<14> candidates;
        candidates.add(0);
        if (bid.amount > 0) candidates.add(bid.amount - 1);
        candidates.add(bid.amount + 1);
        candidates.add_around(o_n);
        if (n >= 2) candidates.add_around(o_nm1);
        candidates.add(ctx.max_amount + 1);

        for (std::size_t ci = 0; ci < candidates.count; ++ci) {
            const Amount v = candidates.values[ci];
            if (v == *bid.true_value) continue;
            Amount clearing = 0;
            const Payoff delta = fast_replace_delta(ctx, i, v, &clearing);
            best.offer(delta, replace_scenario(bid, v, pool.round),
                       as_payoff(clearing) - as_payoff(ctx.b_n));
        }
    }

    {
        CandidateSet<12> candidates;
        candidates.add(0);
        candidates.add(ctx.b_2n);
        candidates.add(ctx.index.stat(n + 1));
        candidates.add_around(ctx.b_n);
        if (n >= 2) candidates.add_around(ctx.index.stat(n - 1));
        candidates.add(ctx.max_amount + 1);
        const std::string fake_id = make_fake_tx_id(0);
        for (std::size_t ci = 0; ci < candidates.count; ++ci) {
            const Amount v = candidates.values[ci];
            Amount clearing = 0;
            const Payoff delta = fast_fake_user_delta(ctx, v, fake_id, &clearing);
            best.offer(delta, fake_user_scenario(v, pool.round),
                       as_payoff(clearing) - as_payoff(ctx.b_n));
        }
    }
    return best.finding(config.tolerance);
}

AuditFinding fast_audit_mic(const FastContext& ctx, const AuditConfig& config) {
    const Mempool& pool = *ctx.pool;
    const std::size_t n = ctx.params.n;

    CandidateSet<12> candidates;
    candidates.add(ctx.b_2n);
    candidates.add(ctx.b_2n + 1);
    candidates.add_around(ctx.b_n);
    if (n >= 2) candidates.add_around(ctx.index.stat(n - 1));
    candidates.add(ctx.max_amount + 1);

    const std::string fake_id = make_fake_tx_id(0);
    BestTracker best;
    for (std::size_t ci = 0; ci < candidates.count; ++ci) {
        const Amount v = candidates.values[ci];
        if (v < ctx.b_2n) continue;
        Amount clearing = 0;
        const Payoff delta = fast_miner_fake_delta(ctx, v, fake_id, &clearing);
        best.offer(delta, miner_fake_scenario(v, pool.round),
                   as_payoff(clearing) - as_payoff(ctx.b_n));
    }
    return best.finding(config.tolerance);
}

AuditFinding fast_audit_scp(const FastContext& ctx, std::size_t c, const AuditConfig& config) {
    const Mempool& pool = *ctx.pool;
    const AuditFinding mic = fast_audit_mic(ctx, config);
    if (c == 0) return mic;
    const std::size_t n = ctx.params.n;

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < pool.bids.size(); ++i)
        if (pool.bids[i].amount < ctx.b_n) eligible.push_back(i);

    BestTracker best;
    if (mic.witness) best.offer(mic.best_delta, *mic.witness, mic.witness_clearing_delta);

    for (const std::size_t i : eligible) {
        const Bid& bid = pool.bids[i];
        CandidateSet<12> candidates;
        candidates.add(bid.amount + 1);
        candidates.add_around(ctx.b_n, bid.amount);
        if (n >= 2) candidates.add_around(ctx.index.stat(n - 1), bid.amount);
        candidates.add(ctx.max_amount + 1);

        for (std::size_t ci = 0; ci < candidates.count; ++ci) {
            const Amount r = candidates.values[ci];
            if (r <= bid.amount) continue;  // at most the no-op, covered by honesty
            Amount clearing = 0;
            const Payoff delta = fast_raise_delta(ctx, i, r, &clearing);
            best.offer(delta, raise_scenario({{&bid, r}}, pool.round),
                       as_payoff(clearing) - as_payoff(ctx.b_n));
        }
    }

    bool deep = false;
    if (c >= 2 && eligible.size() >= 2) {
        deep = true;
        // Multi-member coalitions have no incremental shortcut; enumerate the
        // naive space (sizes 2..c) with the production evaluator, guarded by
        // the evaluation budget.
        const std::vector<Amount> grid = deviation_grid(pool, config);
        const std::uint64_t cost =
            detail::naive_scp_eval_count(eligible.size(), grid.size(), c) -
            detail::naive_scp_eval_count(eligible.size(), grid.size(), 1);
        if (cost > config.max_evals) throw InfeasibleSearchError(cost, config.max_evals);

        std::vector<const Bid*> members_pool;
        for (const std::size_t i : eligible) members_pool.push_back(&pool.bids[i]);
        std::sort(members_pool.begin(), members_pool.end(),
                  [](const Bid* a, const Bid* b) { return a->tx_id < b->tx_id; });

        std::vector<std::size_t> subset;
        std::vector<std::pair<const Bid*, Amount>> members;
        const std::function<void(std::size_t)> assign = [&](std::size_t depth) {
            if (depth == subset.size()) {
                DeviationScenario s = raise_scenario(members, pool.round);
                const ScenarioResult r =
                    evaluate_scenario(pool, s, ctx.params, config.future_model);
                best.offer(r.delta, s, 0);
                return;
            }
            const Bid* bid = members_pool[subset[depth]];
            for (const Amount v : grid) {
                if (v < bid->amount) continue;
                members.emplace_back(bid, v);
                assign(depth + 1);
                members.pop_back();
            }
        };
        const std::function<void(std::size_t, std::size_t)> choose =
            [&](std::size_t start, std::size_t remaining) {
                if (remaining == 0) {
                    assign(0);
                    return;
                }
                for (std::size_t i = start; i + remaining <= members_pool.size(); ++i) {
                    subset.push_back(i);
                    choose(i + 1, remaining - 1);
                    subset.pop_back();
                }
            };
        for (std::size_t size = 2; size <= std::min(c, members_pool.size()); ++size)
            choose(0, size);
    }

    AuditFinding f = best.finding(config.tolerance);
    if (deep) finalize_clearing(f, pool, ctx.params);
    return f;
}

}  // namespace

AuditFinding audit_uic(const Mempool& pool, const AuctionParams& params, const AuditConfig& config) {
    validate_params(params);
    if (!is_abstract(config.future_model))
        return detail::naive_audit_uic(pool, params, config, &evaluate_scenario);
    if (pool.bids.empty()) return {};
    require_true_values(pool);
    return fast_audit_uic(FastContext(pool, params, config), config);
}

AuditFinding audit_mic(const Mempool& pool, const AuctionParams& params, const AuditConfig& config) {
    validate_params(params);
    if (!is_abstract(config.future_model))
        return detail::naive_audit_mic(pool, params, config, &evaluate_scenario);
    if (pool.bids.empty()) return {};
    return fast_audit_mic(FastContext(pool, params, config), config);
}

AuditFinding audit_scp(const Mempool& pool, const AuctionParams& params, std::size_t c,
                       const AuditConfig& config) {
    validate_params(params);
    if (!is_abstract(config.future_model))
        return detail::naive_audit_scp(pool, params, c, config, &evaluate_scenario);
    if (pool.bids.empty()) return {};
    if (c > 0) require_true_values(pool);
    return fast_audit_scp(FastContext(pool, params, config), c, config);
}

BlockAudit audit_block(std::uint64_t block_number, const Mempool& pool, const AuctionParams& params,
                       const AuditConfig& config) {
    validate_params(params);
    BlockAudit audit;
    audit.block_number = block_number;
    const std::size_t c_max = std::max<std::size_t>(config.collusion_c, 1);
    const std::vector<SampledDeviation> samples = sample_deviations(pool, config, block_number);

    if (is_abstract(config.future_model) && !pool.bids.empty()) {
        // One shared context serves every audit plus the sampled deviations.
        require_true_values(pool);
        const FastContext ctx(pool, params, config);
        audit.uic = fast_audit_uic(ctx, config);
        audit.mic = fast_audit_mic(ctx, config);
        for (std::size_t c = 1; c <= c_max; ++c)
            audit.scp.push_back(fast_audit_scp(ctx, c, config));
        std::unordered_map<std::string, std::size_t> by_tx;
        for (std::size_t i = 0; i < pool.bids.size(); ++i) by_tx.emplace(pool.bids[i].tx_id, i);
        for (const SampledDeviation& sample : samples) {
            audit.sampled_delta_sum +=
                fast_replace_delta(ctx, by_tx.at(sample.tx_id), sample.amount);
            audit.sampled_count += 1;
        }
        return audit;
    }

    audit.uic = audit_uic(pool, params, config);
    audit.mic = audit_mic(pool, params, config);
    for (std::size_t c = 1; c <= c_max; ++c) audit.scp.push_back(audit_scp(pool, params, c, config));
    for (const SampledDeviation& sample : samples) {
        audit.sampled_delta_sum +=
            evaluate_user_deviation(pool, sample.tx_id, sample.amount, params, config.future_model)
                .delta;
        audit.sampled_count += 1;
    }
    return audit;
}

DatasetAudit audit_dataset(const std::vector<BlockRecord>& records, const AuditConfig& config,
                           std::size_t n_override) {
    DatasetAudit result;
    result.blocks.resize(records.size());
    std::vector<std::string> failures(records.size());
    std::vector<std::optional<InfeasibleSearchError>> infeasible(records.size());

    #pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < records.size(); ++i) {
        try {
            const Mempool pool = to_mempool(records[i]);
            AuctionParams params;
            params.n = n_override ? n_override : records[i].capacity_n;
            result.blocks[i] = audit_block(records[i].block_number, pool, params, config);
        } catch (const InfeasibleSearchError& e) {
            infeasible[i] = e;
            failures[i] = e.what();
        } catch (const Error& e) {
            failures[i] = e.what();
        }
    }
    // Budget overruns keep their type (and exit-code mapping); anything else
    // surfaces as a flat error tagged with the failing block.
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!failures[i].empty()) {
            if (infeasible[i]) throw *infeasible[i];
            throw Error("block " + std::to_string(records[i].block_number) +
                        " audit failed: " + failures[i]);
        }

    const std::size_t c_max = std::max<std::size_t>(config.collusion_c, 1);
    AuditSummary& s = result.summary;
    s.blocks = records.size();
    s.scp_violations.assign(c_max, 0);
    s.scp_delta_sum.assign(c_max, 0);
    for (const BlockAudit& block : result.blocks) {
        s.uic_violations += block.uic.violating ? 1 : 0;
        s.mic_violations += block.mic.violating ? 1 : 0;
        s.uic_delta_sum += block.uic.best_delta;
        s.mic_delta_sum += block.mic.best_delta;
        for (std::size_t c = 0; c < c_max; ++c) {
            s.scp_violations[c] += block.scp[c].violating ? 1 : 0;
            s.scp_delta_sum[c] += block.scp[c].best_delta;
        }
        s.scp_clearing_delta_sum += block.scp[c_max - 1].witness_clearing_delta;
        s.sampled_delta_sum += block.sampled_delta_sum;
        s.sampled_count += block.sampled_count;
    }
    return result;
}

}  // namespace bnp
