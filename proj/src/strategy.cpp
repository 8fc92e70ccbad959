#include "bnp/strategy.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "bnp/errors.hpp"
#include "bnp/pool_index.hpp"

namespace bnp {

FutureCostModel FutureCostModel::next_round_realized(ArrivalGenerator arrivals) {
    FutureCostModel model;
    model.kind = Kind::NextRoundRealized;
    model.arrivals = std::move(arrivals);
    return model;
}

FutureCostModel FutureCostModel::fixed_offset(Amount offset) {
    if (offset == 0) throw ModelParameterError("fixed offset must be at least 1");
    FutureCostModel model;
    model.kind = Kind::FixedOffset;
    model.offset = offset;
    return model;
}

FutureCostModel FutureCostModel::pessimistic() {
    FutureCostModel model;
    model.kind = Kind::Pessimistic;
    return model;
}

namespace {

const Bid* find_bid(const Mempool& pool, const std::string& tx_id) {
    for (const Bid& bid : pool.bids)
        if (bid.tx_id == tx_id) return &bid;
    return nullptr;
}

struct HonestStats {
    Amount b_n = 0;
    Amount b_n_plus_1 = 0;
    Amount b_2n = 0;
    std::optional<Amount> b_n_minus_1;  // absent for n = 1: no bid above the top slot
};

HonestStats honest_stats(const Mempool& pool, const AuctionParams& params) {
    PoolIndex index(pool, params);
    HonestStats s;
    s.b_n = index.stat(params.n);
    s.b_n_plus_1 = index.stat(params.n + 1);
    s.b_2n = index.stat(2 * params.n);
    if (params.n >= 2) s.b_n_minus_1 = index.stat(params.n - 1);
    return s;
}

Mempool apply_scenario(const Mempool& pool, const DeviationScenario& scenario) {
    Mempool deviated = pool;
    for (const auto& [tx_id, new_amount] : scenario.altered_bids) {
        auto it = std::find_if(deviated.bids.begin(), deviated.bids.end(),
                               [&](const Bid& bid) { return bid.tx_id == tx_id; });
        if (it == deviated.bids.end())
            throw UnknownTxError("altered bid references unknown tx_id: " + tx_id);
        it->amount = new_amount;
        if (scenario.kind == DeviationKind::Collusion) it->origin = BidOrigin::ColluderRaised;
    }
    deviated.bids.insert(deviated.bids.end(), scenario.injected_bids.begin(),
                         scenario.injected_bids.end());
    return deviated;
}

struct ActorView {
    bool collects_miner_revenue = false;
    std::unordered_set<std::string> bidders;
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
            std::unordered_set<std::string> altered_ids;
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
    Amount primary_future_fee = 0;
};

// Payoff of the actor's bids over the two-round horizon. Settled bids pay the
// clearing price of their round; under the abstract models a bid pending
// after round 1 is priced at b' from the honest ordering (both worlds alike),
// and under NextRoundRealized a value-less bid that outlives the horizon is
// charged its submission round's clearing price as a pessimistic fallback.
WorldScore score_world(const Mempool& world_pool, const AuctionOutcome& round1,
                       const std::optional<AuctionOutcome>& round2, const ActorView& view,
                       const FutureCostModel& model, Amount abstract_fee,
                       const std::string& primary_tx) {
    WorldScore score;
    if (view.collects_miner_revenue) score.actor_payoff += as_payoff(round1.miner_revenue);

    std::unordered_set<std::string> won1;
    for (const WinnerEntry& w : round1.winners) won1.insert(w.tx_id);
    std::unordered_set<std::string> won2;
    if (round2)
        for (const WinnerEntry& w : round2->winners) won2.insert(w.tx_id);

    for (const Bid& bid : world_pool.bids) {
        if (!view.bidders.count(bid.bidder_id)) continue;

        const Payoff value = bid.true_value ? as_payoff(*bid.true_value) : 0;
        Payoff contribution = 0;
        Amount future_fee = 0;
        if (won1.count(bid.tx_id)) {
            contribution = value - as_payoff(round1.clearing_price);
        } else if (model.kind == FutureCostModel::Kind::NextRoundRealized) {
            if (won2.count(bid.tx_id)) {
                future_fee = round2->clearing_price;
                contribution = value - as_payoff(future_fee);
            } else if (!bid.true_value) {
                future_fee = round1.clearing_price;
                contribution = -as_payoff(future_fee);
            }
        } else {
            future_fee = abstract_fee;
            contribution = value - as_payoff(future_fee);
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

std::string classify_user_deviation(const Mempool& pool, const std::string& tx_id,
                                    Amount new_amount, const AuctionParams& params) {
    validate_params(params);
    const Bid* bid = find_bid(pool, tx_id);
    if (!bid) throw UnknownTxError("no such tx_id in mempool: " + tx_id);
    if (!bid->true_value)
        throw MissingTrueValueError("cannot classify a deviation for a bid without true_value: " +
                                    tx_id);

    const Amount tv = *bid->true_value;
    if (new_amount == tv) throw NotADeviationError("new amount equals true value: not a deviation");

    const HonestStats s = honest_stats(pool, params);
    if (new_amount > tv) {
        if (tv > s.b_n) return "OB-3b";
        if (tv == s.b_n) return "OB-3a";
        if (new_amount >= s.b_n) return "OB-2";
        return "OB-1";
    }
    if (s.b_n > tv) return "UB-1";
    if (new_amount >= s.b_n) return "UB-3";
    if (new_amount > s.b_n_plus_1) return "UB-2b";
    return "UB-2a";
}

ScenarioResult evaluate_scenario(const Mempool& pool, const DeviationScenario& scenario,
                                 const AuctionParams& params, const FutureCostModel& model) {
    const Mempool deviated = apply_scenario(pool, scenario);

    const AuctionOutcome honest1 = run_auction(pool, params);
    const AuctionOutcome deviated1 = run_auction(deviated, params);

    std::optional<AuctionOutcome> honest2;
    std::optional<AuctionOutcome> deviated2;
    if (model.kind == FutureCostModel::Kind::NextRoundRealized) {
        std::vector<Bid> arrivals;
        if (model.arrivals) arrivals = model.arrivals(pool.round + 1);

        Mempool next_honest = honest1.deferred;
        next_honest.bids.insert(next_honest.bids.end(), arrivals.begin(), arrivals.end());
        honest2 = run_auction(next_honest, params);

        Mempool next_deviated = deviated1.deferred;
        next_deviated.bids.insert(next_deviated.bids.end(), arrivals.begin(), arrivals.end());
        deviated2 = run_auction(next_deviated, params);
    }

    Amount abstract_fee = 0;
    if (model.kind == FutureCostModel::Kind::FixedOffset) {
        PoolIndex index(pool, params);
        abstract_fee = index.stat(2 * params.n) + model.offset;
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

ScenarioResult evaluate_user_deviation(const Mempool& pool, const std::string& tx_id,
                                       Amount new_amount, const AuctionParams& params,
                                       const FutureCostModel& model) {
    const std::string label = classify_user_deviation(pool, tx_id, new_amount, params);
    const Bid* bid = find_bid(pool, tx_id);

    DeviationScenario scenario;
    scenario.kind = (new_amount > *bid->true_value) ? DeviationKind::Overbid : DeviationKind::Underbid;
    scenario.actor = bid->bidder_id;
    scenario.altered_bids[tx_id] = new_amount;
    scenario.case_label = label;
    scenario.round = pool.round;
    return evaluate_scenario(pool, scenario, params, model);
}

ScenarioResult evaluate_miner_fake_bid(const Mempool& pool, Amount fake_amount,
                                       const AuctionParams& params, const FutureCostModel& model) {
    validate_params(params);
    if (pool.bids.empty()) throw ValidationError("miner fake bid needs at least one genuine bid");

    const HonestStats s = honest_stats(pool, params);
    if (fake_amount < s.b_2n)
        throw DominatedBidError("fake bid below the padded window floor is strictly dominated");

    DeviationScenario scenario;
    scenario.kind = DeviationKind::MinerFakeBid;
    scenario.actor = "miner";
    scenario.injected_bids.push_back(
        {make_fake_tx_id(0), "miner", fake_amount, std::nullopt, BidOrigin::MinerFake});
    if (fake_amount < s.b_n)
        scenario.case_label = "MIC-1";
    else if (!s.b_n_minus_1 || fake_amount <= *s.b_n_minus_1)
        scenario.case_label = "MIC-2";
    else
        scenario.case_label = "MIC-3";
    scenario.round = pool.round;
    return evaluate_scenario(pool, scenario, params, model);
}

ScenarioResult evaluate_collusion(const Mempool& pool, const std::vector<CollusionMember>& members,
                                  const AuctionParams& params, const FutureCostModel& model) {
    validate_params(params);
    if (members.empty()) throw ValidationError("collusion needs at least one member");

    const HonestStats s = honest_stats(pool, params);

    DeviationScenario scenario;
    scenario.kind = DeviationKind::Collusion;
    scenario.actor = "coalition";
    scenario.round = pool.round;
    for (const CollusionMember& member : members) {
        const Bid* bid = find_bid(pool, member.tx_id);
        if (!bid) throw UnknownTxError("no such tx_id in mempool: " + member.tx_id);
        if (!bid->true_value)
            throw MissingTrueValueError("collusion member lacks true_value: " + member.tx_id);
        if (bid->amount >= s.b_n)
            throw AlreadyWinningError("collusion member already wins honestly: " + member.tx_id);
        if (member.raised_amount < bid->amount)
            throw ValidationError("collusion raise may not lower a bid: " + member.tx_id);
        if (scenario.altered_bids.count(member.tx_id))
            throw ValidationError("collusion member listed twice: " + member.tx_id);
        scenario.altered_bids[member.tx_id] = member.raised_amount;
    }

    if (members.size() == 1) {
        const Bid* bid = find_bid(pool, members[0].tx_id);
        const Amount raised = members[0].raised_amount;
        const bool floor_inside = bid->amount >= s.b_2n;
        if (raised >= s.b_n)
            scenario.case_label = floor_inside ? "SCP-1" : "SCP-2";
        else
            scenario.case_label = floor_inside ? "SCP-3" : "SCP-4";
    } else {
        scenario.case_label = "SCP-multi";
    }
    return evaluate_scenario(pool, scenario, params, model);
}

SimulationResult simulate_rounds(const Mempool& initial, const ArrivalGenerator& arrivals,
                                 const AuctionParams& params, std::uint64_t rounds,
                                 const std::vector<DeviationScenario>& interventions) {
    validate_params(params);
    if (rounds == 0) throw ValidationError("simulation needs at least one round");

    SimulationResult result;
    Mempool current = initial;
    // Value-less bids that may outlive the horizon, with the clearing price
    // of the round they entered in (the pessimistic fallback charge).
    std::unordered_map<std::string, std::pair<std::string, Amount>> pending_fakes;

    for (std::uint64_t t = 0; t < rounds; ++t) {
        const std::string miner_actor = "miner:r" + std::to_string(current.round);

        for (const DeviationScenario& intervention : interventions) {
            if (intervention.round != current.round) continue;
            DeviationScenario localized = intervention;
            // The deviating miner of this round owns its injected fakes.
            for (Bid& bid : localized.injected_bids)
                if (bid.bidder_id == "miner") bid.bidder_id = miner_actor;
            current = apply_scenario(current, localized);
        }

        const AuctionOutcome out = run_auction(current, params);

        result.ledger[miner_actor] += as_payoff(out.miner_revenue);
        std::unordered_map<std::string, const Bid*> by_tx;
        by_tx.reserve(current.bids.size());
        for (const Bid& bid : current.bids) by_tx.emplace(bid.tx_id, &bid);
        for (const WinnerEntry& w : out.winners) {
            const Bid& bid = *by_tx.at(w.tx_id);
            const Payoff value = bid.true_value ? as_payoff(*bid.true_value) : 0;
            result.ledger[bid.bidder_id] += value - as_payoff(w.paid);
            pending_fakes.erase(bid.tx_id);
        }
        for (const Bid& bid : out.deferred.bids)
            if (!bid.true_value && !pending_fakes.count(bid.tx_id))
                pending_fakes[bid.tx_id] = {bid.bidder_id, out.clearing_price};

        result.rounds.push_back(out);
        current = result.rounds.back().deferred;
        if (t + 1 < rounds && arrivals) {
            std::vector<Bid> fresh_bids = arrivals(current.round);
            current.bids.insert(current.bids.end(), fresh_bids.begin(), fresh_bids.end());
        }
    }

    for (const auto& [tx_id, owner_charge] : pending_fakes)
        result.ledger[owner_charge.first] -= as_payoff(owner_charge.second);

    return result;
}

std::string make_fake_tx_id(std::uint64_t k) {
    return "!fake/" + std::to_string(k);
}

}  // namespace bnp
