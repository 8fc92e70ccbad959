#include "bnp/reference.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "bnp/errors.hpp"

namespace bnp::reference {
namespace {

// Literal transcription of the mechanism: sort descending (ties by tx_id via
// pre-sort + stable sort), list the amounts, append zeros until the list
// reaches 2n, then read everything off that list.
struct Cleared {
    std::vector<Bid> sorted;
    std::vector<Amount> padded;
    Amount clearing = 0;
    Amount revenue = 0;
};

Cleared clear_pool(const Mempool& pool, const AuctionParams& params) {
    Cleared c;
    c.sorted = pool.bids;
    std::sort(c.sorted.begin(), c.sorted.end(),
              [](const Bid& a, const Bid& b) { return a.tx_id < b.tx_id; });
    std::stable_sort(c.sorted.begin(), c.sorted.end(),
                     [](const Bid& a, const Bid& b) { return a.amount > b.amount; });

    for (const Bid& bid : c.sorted) c.padded.push_back(bid.amount);
    while (c.padded.size() < 2 * params.n) c.padded.push_back(0);

    c.clearing = c.padded[params.n - 1];
    for (std::size_t i = 1; i <= params.n; ++i) c.revenue += c.padded[(params.n - 1) + i];
    return c;
}

}  // namespace

AuctionOutcome run_auction(const Mempool& pool, const AuctionParams& params) {
    validate_params(params);
    validate_mempool(pool);

    const Cleared c = clear_pool(pool, params);
    const std::size_t winner_count = std::min(pool.bids.size(), params.n);

    AuctionOutcome out;
    out.clearing_price = c.clearing;
    out.miner_revenue = c.revenue;
    out.total_collected = static_cast<Amount>(winner_count) * c.clearing;
    out.burned = out.total_collected - out.miner_revenue;
    for (std::size_t i = 0; i < winner_count; ++i) {
        const Bid& bid = c.sorted[i];
        out.winners.push_back({bid.tx_id, c.clearing, bid.amount - c.clearing});
    }
    out.deferred.round = pool.round + 1;
    for (std::size_t i = winner_count; i < c.sorted.size(); ++i)
        out.deferred.bids.push_back(c.sorted[i]);
    return out;
}

namespace {

Mempool apply_scenario(const Mempool& pool, const DeviationScenario& scenario) {
    Mempool deviated = pool;
    for (const auto& [tx_id, new_amount] : scenario.altered_bids) {
        bool found = false;
        for (Bid& bid : deviated.bids) {
            if (bid.tx_id != tx_id) continue;
            bid.amount = new_amount;
            if (scenario.kind == DeviationKind::Collusion) bid.origin = BidOrigin::ColluderRaised;
            found = true;
            break;
        }
        if (!found) throw UnknownTxError("altered bid references unknown tx_id: " + tx_id);
    }
    for (const Bid& injected : scenario.injected_bids) deviated.bids.push_back(injected);
    return deviated;
}

std::set<std::string> winner_ids(const AuctionOutcome& out) {
    std::set<std::string> ids;
    for (const WinnerEntry& w : out.winners) ids.insert(w.tx_id);
    return ids;
}

// The bidder_ids whose payoffs the scenario's actor collects. The miner is
// the pseudo-bidder "miner"; a coalition collects for the miner plus every
// bidder owning an altered or injected bid.
struct ActorView {
    bool collects_miner_revenue = false;
    std::set<std::string> bidders;
};

ActorView actor_view(const Mempool& deviated, const DeviationScenario& scenario) {
    ActorView view;
    switch (scenario.kind) {
        case DeviationKind::Overbid:
        case DeviationKind::Underbid:
        case DeviationKind::FakeUserBid:
            view.bidders.insert(scenario.actor);
            break;
        case DeviationKind::MinerFakeBid:
            view.collects_miner_revenue = true;
            view.bidders.insert("miner");
            break;
        case DeviationKind::Collusion: {
            view.collects_miner_revenue = true;
            view.bidders.insert("miner");
            std::set<std::string> altered_ids;
            for (const auto& [tx_id, amount] : scenario.altered_bids) altered_ids.insert(tx_id);
            for (const Bid& bid : deviated.bids)
                if (altered_ids.count(bid.tx_id)) view.bidders.insert(bid.bidder_id);
            for (const Bid& bid : scenario.injected_bids) view.bidders.insert(bid.bidder_id);
            break;
        }
    }
    return view;
}

struct WorldScore {
    Payoff actor_payoff = 0;
    Amount primary_future_fee = 0;  // future fee charged to the primary tx
};

// Scores one world over the two-round horizon. round2 carries the realized
// next round when the model is NextRoundRealized, otherwise nothing.
WorldScore score_world(const Mempool& world_pool, const AuctionOutcome& round1,
                       const std::optional<AuctionOutcome>& round2, const ActorView& view,
                       const FutureCostModel& model, Amount abstract_future_fee,
                       const std::string& primary_tx) {
    WorldScore score;
    if (view.collects_miner_revenue) score.actor_payoff += as_payoff(round1.miner_revenue);

    const std::set<std::string> won1 = winner_ids(round1);
    const std::set<std::string> won2 = round2 ? winner_ids(*round2) : std::set<std::string>{};

    for (const Bid& bid : world_pool.bids) {
        if (!view.bidders.count(bid.bidder_id)) continue;

        Payoff contribution = 0;
        Amount future_fee = 0;
        if (won1.count(bid.tx_id)) {
            // Settled in round 1 at the round-1 clearing price.
            contribution = bid.true_value ? as_payoff(*bid.true_value) - as_payoff(round1.clearing_price)
                                          : -as_payoff(round1.clearing_price);
        } else if (model.kind == FutureCostModel::Kind::NextRoundRealized) {
            if (round2 && won2.count(bid.tx_id)) {
                future_fee = round2->clearing_price;
                contribution = bid.true_value ? as_payoff(*bid.true_value) - as_payoff(future_fee)
                                              : -as_payoff(future_fee);
            } else if (!bid.true_value) {
                // Value-less bid still pending at the horizon: charged the
                // clearing price of the round it was submitted in, so costs
                // are never understated.
                future_fee = round1.clearing_price;
                contribution = -as_payoff(future_fee);
            }
            // A genuine bid still pending at the horizon scores zero.
        } else {
            // Abstract future models price eventual inclusion at b' computed
            // from the honest round-1 ordering, identically in both worlds.
            future_fee = abstract_future_fee;
            contribution = bid.true_value ? as_payoff(*bid.true_value) - as_payoff(future_fee)
                                          : -as_payoff(future_fee);
        }

        score.actor_payoff += contribution;
        if (bid.tx_id == primary_tx) score.primary_future_fee = future_fee;
    }
    return score;
}

std::string primary_tx_of(const DeviationScenario& scenario) {
    if (!scenario.altered_bids.empty()) return scenario.altered_bids.begin()->first;
    if (!scenario.injected_bids.empty()) return scenario.injected_bids.front().tx_id;
    return {};
}

}  // namespace

ScenarioResult evaluate_scenario(const Mempool& pool, const DeviationScenario& scenario,
                                 const AuctionParams& params, const FutureCostModel& model) {
    const Mempool deviated = apply_scenario(pool, scenario);

    const AuctionOutcome honest1 = reference::run_auction(pool, params);
    const AuctionOutcome deviated1 = reference::run_auction(deviated, params);

    std::optional<AuctionOutcome> honest2;
    std::optional<AuctionOutcome> deviated2;
    if (model.kind == FutureCostModel::Kind::NextRoundRealized) {
        std::vector<Bid> arrivals;
        if (model.arrivals) arrivals = model.arrivals(pool.round + 1);

        Mempool next_honest = honest1.deferred;
        next_honest.bids.insert(next_honest.bids.end(), arrivals.begin(), arrivals.end());
        honest2 = reference::run_auction(next_honest, params);

        Mempool next_deviated = deviated1.deferred;
        next_deviated.bids.insert(next_deviated.bids.end(), arrivals.begin(), arrivals.end());
        deviated2 = reference::run_auction(next_deviated, params);
    }

    // b' for the abstract models, off the honest padded ordering.
    Amount abstract_fee = 0;
    if (model.kind == FutureCostModel::Kind::FixedOffset) {
        const Cleared honest = clear_pool(pool, params);
        abstract_fee = honest.padded[2 * params.n - 1] + model.offset;
    } else if (model.kind == FutureCostModel::Kind::Pessimistic) {
        abstract_fee = honest1.clearing_price;
    }

    const ActorView view = actor_view(deviated, scenario);
    const std::string primary = primary_tx_of(scenario);

    const WorldScore honest_score =
        score_world(pool, honest1, honest2, view, model, abstract_fee, primary);
    const WorldScore deviated_score =
        score_world(deviated, deviated1, deviated2, view, model, abstract_fee, primary);

    ScenarioResult result;
    result.honest_payoff = honest_score.actor_payoff;
    result.deviant_payoff = deviated_score.actor_payoff;
    result.delta = result.deviant_payoff - result.honest_payoff;
    result.case_label = scenario.case_label;
    result.future_fee_charged = deviated_score.primary_future_fee;
    return result;
}

}  // namespace bnp::reference
