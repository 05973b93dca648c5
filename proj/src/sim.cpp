#include "segchain/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "segchain/analysis.hpp"
#include "segchain/errors.hpp"
#include "segchain/storage_proof.hpp"

namespace segchain {

using ordered_json = nlohmann::ordered_json;

const char* adversary_kind_name(AdversaryKind kind) {
    switch (kind) {
    case AdversaryKind::none: return "none";
    case AdversaryKind::optimal_placement: return "optimal_placement";
    case AdversaryKind::capture_and_vanish: return "capture_and_vanish";
    }
    return "none";
}

std::optional<AdversaryKind> adversary_kind_from_name(std::string_view name) {
    if (name == "none")
        return AdversaryKind::none;
    if (name == "optimal_placement")
        return AdversaryKind::optimal_placement;
    if (name == "capture_and_vanish")
        return AdversaryKind::capture_and_vanish;
    return std::nullopt;
}

void SimConfig::validate() const {
    if (occupations == 0)
        raise(Errc::config_error, "occupations");
    if (initial_segments == 0)
        raise(Errc::config_error, "initial_segments");
    if (iterations == 0)
        raise(Errc::config_error, "iterations");
    if (base_difficulty == 0)
        raise(Errc::config_error, "base_difficulty");
    if (honest_power < 0)
        raise(Errc::config_error, "honest_power");
    if (adversary_power < 0)
        raise(Errc::config_error, "adversary_power");
    if (genesis_adversaries > std::uint64_t(occupations) * initial_segments)
        raise(Errc::config_error, "genesis_adversaries");
    if (adversary.target_occupations > occupations)
        raise(Errc::config_error, "target_occupations");
    if (genesis_accounts == 0 && txs_per_block > 0)
        raise(Errc::config_error, "genesis_accounts");
    if (join_rate < 0)
        raise(Errc::config_error, "join_rate");
}

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(value, &used);
        if (used != value.size())
            raise(Errc::config_error, key + ": trailing characters in '" + value + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        raise(Errc::config_error, key + ": not an unsigned integer: '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size())
            raise(Errc::config_error, key + ": trailing characters in '" + value + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        raise(Errc::config_error, key + ": not a number: '" + value + "'");
    }
}

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front()))
        s.erase(s.begin());
    while (!s.empty() && issp(s.back()))
        s.pop_back();
    return s;
}

} // namespace

SimConfig parse_sim_config(std::string_view text) {
    SimConfig config;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#')
            continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            raise(Errc::config_error, "expected key=value, got '" + stripped + "'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key == "m")
            config.occupations = static_cast<std::uint32_t>(parse_u64(key, value));
        else if (key == "s0")
            config.initial_segments = static_cast<std::uint32_t>(parse_u64(key, value));
        else if (key == "P")
            config.base_difficulty = parse_u64(key, value);
        else if (key == "honest_power")
            config.honest_power = parse_double(key, value);
        else if (key == "adversary_power")
            config.adversary_power = parse_double(key, value);
        else if (key == "adversary_nodes")
            config.adversary_nodes = parse_u64(key, value);
        else if (key == "genesis_adversaries")
            config.genesis_adversaries = parse_u64(key, value);
        else if (key == "strategy") {
            auto kind = adversary_kind_from_name(value);
            if (!kind)
                raise(Errc::config_error, "strategy: unknown value '" + value + "'");
            config.adversary.kind = *kind;
        } else if (key == "target_occupations")
            config.adversary.target_occupations =
                static_cast<std::uint32_t>(parse_u64(key, value));
        else if (key == "subsidy")
            config.rewards.initial_subsidy = parse_u64(key, value);
        else if (key == "halving_interval")
            config.rewards.halving_interval = parse_u64(key, value);
        else if (key == "storage_reward_pool")
            config.rewards.storage_reward_pool = parse_u64(key, value);
        else if (key == "iterations")
            config.iterations = parse_u64(key, value);
        else if (key == "seed")
            config.seed = parse_u64(key, value);
        else if (key == "txs_per_block")
            config.txs_per_block = static_cast<std::uint32_t>(parse_u64(key, value));
        else if (key == "genesis_accounts")
            config.genesis_accounts = static_cast<std::uint32_t>(parse_u64(key, value));
        else if (key == "account_funding")
            config.account_funding = parse_u64(key, value);
        else if (key == "join_rate")
            config.join_rate = parse_double(key, value);
        else if (key == "reassign_interval")
            config.reassign_interval = parse_u64(key, value);
        else
            raise(Errc::config_error, "unknown key: " + key);
    }
    config.validate();
    return config;
}

std::string sim_config_to_text(const SimConfig& config) {
    std::ostringstream out;
    out << "m=" << config.occupations << "\n";
    out << "s0=" << config.initial_segments << "\n";
    out << "P=" << config.base_difficulty << "\n";
    out << "honest_power=" << config.honest_power << "\n";
    out << "adversary_power=" << config.adversary_power << "\n";
    out << "adversary_nodes=" << config.adversary_nodes << "\n";
    out << "genesis_adversaries=" << config.genesis_adversaries << "\n";
    out << "strategy=" << adversary_kind_name(config.adversary.kind) << "\n";
    out << "target_occupations=" << config.adversary.target_occupations << "\n";
    out << "subsidy=" << config.rewards.initial_subsidy << "\n";
    out << "halving_interval=" << config.rewards.halving_interval << "\n";
    out << "storage_reward_pool=" << config.rewards.storage_reward_pool << "\n";
    out << "iterations=" << config.iterations << "\n";
    out << "seed=" << config.seed << "\n";
    out << "txs_per_block=" << config.txs_per_block << "\n";
    out << "genesis_accounts=" << config.genesis_accounts << "\n";
    out << "account_funding=" << config.account_funding << "\n";
    out << "join_rate=" << config.join_rate << "\n";
    out << "reassign_interval=" << config.reassign_interval << "\n";
    return out.str();
}

std::string SimOutcome::summary_json() const {
    ordered_json j;
    j["iterations_run"] = iterations_run;
    j["final_height"] = final_height;
    j["occupations"] = occupations;
    j["final_segments"] = final_segments;
    j["halted"] = halted;
    j["halt_reason"] = halt_reason;
    j["growth_events"] = growth_events;
    j["shrink_events"] = shrink_events;
    j["eliminations"] = eliminations;
    j["backfills"] = backfills;
    j["assignment_epochs"] = assignment_epochs;
    j["target_captures"] = target_captures;
    j["any_captures"] = any_captures;
    j["proofs_ok"] = proofs_ok;
    j["proofs_failed"] = proofs_failed;
    j["issued_supply"] = issued_supply;
    j["total_supply"] = total_supply;
    ordered_json losses = ordered_json::array();
    for (const LossEvent& loss : segments_lost)
        losses.push_back({{"height", loss.height}, {"segment", loss.segment}});
    j["segments_lost"] = losses;
    ordered_json credits = ordered_json::object();
    for (const auto& [key, credit] : reward_credits)
        credits[to_hex(key)] = credit;
    j["reward_credits"] = credits;
    return j.dump(2) + "\n";
}

std::string SimOutcome::events_jsonl() const {
    std::string out;
    for (const EventRecord& event : events) {
        out += "{\"height\":" + std::to_string(event.height) + ",\"kind\":\"" + event.kind +
               "\",\"payload\":" + event.payload + "}\n";
    }
    return out;
}

std::string SimOutcome::roster_csv() const {
    std::string out = "identity_key,occupation,segment,status,honest\n";
    for (const auto& row : roster_rows)
        out += row[0] + "," + row[1] + "," + row[2] + "," + row[3] + "," + row[4] + "\n";
    return out;
}

const std::map<IdentityKey, std::uint64_t>& reward_totals(const SimOutcome& outcome) {
    return outcome.reward_credits;
}

namespace {

std::vector<Address> make_accounts(const SimConfig& config) {
    config.validate();
    std::vector<Address> accounts;
    accounts.reserve(config.genesis_accounts);
    for (std::uint32_t i = 0; i < config.genesis_accounts; ++i) {
        std::vector<std::uint8_t> material;
        put_u64(material, config.seed);
        const char* tag = "genesis-account";
        material.insert(material.end(), tag, tag + std::strlen(tag));
        put_u64(material, i);
        Digest256 d = hash_bytes(material);
        Address addr{};
        addr[0] = 0x02;
        std::copy(d.bytes.begin(), d.bytes.end(), addr.begin() + 1);
        accounts.push_back(addr);
    }
    return accounts;
}

LedgerState make_genesis(const std::vector<Address>& accounts, std::uint64_t funding) {
    LedgerState genesis;
    for (const Address& addr : accounts)
        genesis.records[addr] = funding;
    return genesis;
}

} // namespace

Simulation::Simulation(SimConfig config)
    : config_(std::move(config)),
      accounts_(make_accounts(config_)),
      chain_(make_genesis(accounts_, config_.account_funding), config_.rewards),
      roster_(config_.occupations, config_.initial_segments),
      queue_(config_.occupations),
      segments_(config_.initial_segments),
      rng_mining_(config_.seed, "mining"),
      rng_txgen_(config_.seed, "txgen") {
    bootstrap();
}

IdentityKey Simulation::fresh_identity(const char* stream, std::uint64_t index) {
    std::vector<std::uint8_t> material;
    put_u64(material, config_.seed);
    material.insert(material.end(), stream, stream + std::strlen(stream));
    put_u64(material, index);
    return hash_bytes(material).bytes;
}

void Simulation::bootstrap() {
    const std::uint32_t m = config_.occupations;
    const std::uint32_t s0 = config_.initial_segments;
    const std::uint64_t n = std::uint64_t(m) * s0;

    std::size_t honest_total = n > config_.genesis_adversaries
                                   ? std::size_t(n - config_.genesis_adversaries)
                                   : 0;
    if (config_.honest_power > 0 && honest_total > 0)
        honest_node_power_ = config_.honest_power / static_cast<double>(honest_total);

    // adversary genesis presence, near-equal over the front T occupations,
    // spilling right when an occupation is full
    std::uint32_t spots = config_.adversary.target_occupations
                              ? config_.adversary.target_occupations
                              : m;
    std::vector<std::uint64_t> counts(m, 0);
    if (config_.genesis_adversaries > 0) {
        auto desired = optimal_placement(config_.genesis_adversaries, spots);
        std::uint64_t leftover = 0;
        for (std::uint32_t i = 0; i < spots; ++i) {
            counts[i] = std::min<std::uint64_t>(desired[i], s0);
            leftover += desired[i] - counts[i];
        }
        for (std::uint32_t i = 0; i < m && leftover > 0; ++i) {
            std::uint64_t add = std::min<std::uint64_t>(leftover, s0 - counts[i]);
            counts[i] += add;
            leftover -= add;
        }
    }

    // build per-occupation identity rows and hand out segments by ranked
    // assignment so the genesis epoch is already rank-randomized
    std::vector<std::vector<IdentityKey>> rows(m);
    std::map<IdentityKey, NodeRecord> records;
    std::uint64_t index = 0;
    for (std::uint32_t occ = 1; occ <= m; ++occ) {
        for (std::uint32_t j = 0; j < s0; ++j) {
            NodeRecord node;
            node.identity_key = fresh_identity("genesis-roster", index++);
            node.occupation = occ;
            node.honest = j >= counts[occ - 1];
            node.power = node.honest ? honest_node_power_ : 1.0;
            rows[occ - 1].push_back(node.identity_key);
            records[node.identity_key] = node;
        }
    }

    AssignmentTable table = assign_storage(rows, chain_.block_hash_at(0), 0);
    for (std::uint32_t occ = 1; occ <= m; ++occ) {
        for (std::uint32_t seg = 1; seg <= s0; ++seg) {
            NodeRecord node = records.at(table.at(occ, seg));
            roster_.place(std::move(node), seg);
        }
    }
    for (const NodeRecord* node : roster_.all())
        runtime_[node->identity_key] = KeeperRuntime{0, 0.0, false, true};

    headers_.push_back(HeaderInfo{chain_.header_at(0), 0});
    outcome_.occupations = m;
    outcome_.assignment_epochs = 1; // the genesis placement
    capture_scan(0);
}

void Simulation::record(std::uint64_t height, const char* kind, std::string payload) {
    outcome_.events.push_back(EventRecord{height, kind, std::move(payload)});
}

void Simulation::halt(std::uint64_t h, const std::string& reason) {
    halted_ = true;
    halt_reason_ = reason;
    ordered_json payload{{"reason", reason}};
    record(h, "block", payload.dump()); // anomaly entries ride the block kind
}

void Simulation::capture_scan(std::uint64_t h) {
    bool any = false;
    std::vector<std::uint32_t> captured;
    for (std::uint32_t seg = 1; seg <= segments_; ++seg) {
        bool all_adv = true;
        for (std::uint32_t occ = 1; occ <= config_.occupations && all_adv; ++occ) {
            if (!roster_.occupied(occ, seg) || roster_.at(occ, seg).honest)
                all_adv = false;
        }
        if (all_adv) {
            any = true;
            captured.push_back(seg);
            if (seg == 1)
                ++outcome_.target_captures;
        }
    }
    if (any)
        ++outcome_.any_captures;

    if (config_.adversary.kind == AdversaryKind::capture_and_vanish && !adversary_vanished_ &&
        any) {
        adversary_vanished_ = true;
        for (std::uint32_t seg : captured) {
            outcome_.segments_lost.push_back(LossEvent{h, seg});
            ordered_json keepers = ordered_json::array();
            for (std::uint32_t occ = 1; occ <= config_.occupations; ++occ)
                keepers.push_back(to_hex(roster_.at(occ, seg).identity_key));
            ordered_json payload{{"segment", seg}, {"keepers", keepers}};
            record(h, "loss", payload.dump());
        }
        // the vanished adversary takes its copies with it
        for (auto& [key, runtime] : runtime_) {
            const NodeRecord* node = roster_.find(key);
            if (node && !node->honest)
                runtime.data_held = false;
        }
    }
}

void Simulation::ranked_epoch(std::uint64_t h, const Digest256& bh, const char* cause) {
    AssignmentTable table = assign_storage(roster_, bh, h);
    apply_assignment(roster_, table);
    // every keeper starts a fresh proving window from the epoch
    for (const NodeRecord* node : roster_.all()) {
        auto& rt = runtime_[node->identity_key];
        rt.window_anchor = h;
        rt.window_spent = 0.0;
    }
    ++outcome_.assignment_epochs;
    ordered_json payload{{"cause", cause}, {"segments", segments_}};
    record(h, "reassign", payload.dump());
    epoch_this_height_ = true;
    refresh_copies(h, true);
    capture_scan(h);
}

void Simulation::refresh_copies(std::uint64_t h, bool force_rebuild) {
    if (segments_ > h) { // no valid layout yet
        copies_.clear();
        copies_valid_ = false;
        return;
    }
    SegmentLayout layout = SegmentLayout::make(h, segments_);
    bool can_append = !force_rebuild && copies_valid_ && copies_.size() == segments_ &&
                      layout.base_len() == copies_base_len_ && !copies_.empty() &&
                      !copies_.back().blocks.empty() &&
                      copies_.back().blocks.back().header.height + 1 == h;
    if (can_append) {
        // same cut, one more block: the last segment extends in place
        copies_.back().blocks.push_back(chain_.at(h));
        return;
    }
    std::vector<SegmentCopy> rebuilt = rebuild_segments(copies_, chain_, layout);
    if (copies_valid_) {
        previous_copies_ = std::move(copies_); // retained one further iteration
        previous_expiry_ = h + 1;
    }
    copies_ = std::move(rebuilt);
    copies_base_len_ = layout.base_len();
    copies_valid_ = true;
}

Digest256 Simulation::join_anchor() const {
    std::uint64_t latest = chain_.height();
    std::uint64_t anchor = latest > segments_ ? latest - segments_ : 0;
    return chain_.block_hash_at(anchor);
}

void Simulation::adversary_allocate(std::uint64_t h) {
    adversary_joins_.clear();
    if (config_.adversary.kind == AdversaryKind::none)
        return;

    // collect current adversary identities, actives first (grid order), then
    // pending (queue order); clear paid flags
    std::vector<IdentityKey> actives;
    for (std::uint32_t occ = 1; occ <= config_.occupations; ++occ)
        for (std::uint32_t seg = 1; seg <= segments_; ++seg)
            if (roster_.occupied(occ, seg) && !roster_.at(occ, seg).honest)
                actives.push_back(roster_.at(occ, seg).identity_key);
    std::vector<IdentityKey> pendings;
    for (const NodeRecord* node : queue_.all())
        if (!node->honest)
            pendings.push_back(node->identity_key);

    for (const IdentityKey& key : actives)
        runtime_[key].paid_this_iteration = false;
    for (const IdentityKey& key : pendings)
        runtime_[key].paid_this_iteration = false;

    if (adversary_vanished_)
        return; // gone: nothing gets paid, everything decays

    double funds = config_.adversary_power;
    for (const IdentityKey& key : actives) {
        if (funds >= 1.0) {
            runtime_[key].paid_this_iteration = true;
            funds -= 1.0;
        }
    }
    for (const IdentityKey& key : pendings) {
        if (funds >= 1.0) {
            runtime_[key].paid_this_iteration = true;
            funds -= 1.0;
        }
    }

    // spend the remainder on join PoWs (difficulty P*s, i.e. s power units)
    std::uint64_t alive = actives.size() + pendings.size();
    std::uint32_t spots = config_.adversary.target_occupations
                              ? config_.adversary.target_occupations
                              : config_.occupations;
    while (alive < config_.adversary_nodes && funds >= static_cast<double>(segments_)) {
        // fill the front-T occupation with the largest deficit against the
        // near-equal split, lowest index on ties
        auto desired = optimal_placement(config_.adversary_nodes, spots);
        std::vector<std::uint64_t> have(spots, 0);
        for (const IdentityKey& key : actives) {
            const NodeRecord* node = roster_.find(key);
            if (node && node->occupation <= spots)
                ++have[node->occupation - 1];
        }
        for (const NodeRecord* node : queue_.all())
            if (!node->honest && node->occupation <= spots)
                ++have[node->occupation - 1];
        for (const PowRecord& planned : adversary_joins_)
            if (planned.occupation && *planned.occupation <= spots)
                ++have[*planned.occupation - 1];
        std::uint32_t best = 1;
        std::int64_t best_deficit = std::int64_t(desired[0]) - std::int64_t(have[0]);
        for (std::uint32_t occ = 2; occ <= spots; ++occ) {
            std::int64_t deficit = std::int64_t(desired[occ - 1]) - std::int64_t(have[occ - 1]);
            if (deficit > best_deficit) {
                best = occ;
                best_deficit = deficit;
            }
        }
        PowRecord pow;
        pow.prev_block_ref = join_anchor();
        pow.identity_key = fresh_identity("adversary-join", adversary_join_counter_++);
        pow.occupation = best;
        pow.claimed_difficulty = config_.base_difficulty * segments_;
        adversary_joins_.push_back(pow);
        funds -= static_cast<double>(segments_);
        ++alive;
    }
    (void)h;
}

void Simulation::pending_keepalive(std::uint64_t h) {
    std::vector<const NodeRecord*> snapshot = queue_.all();
    std::vector<IdentityKey> drops;
    for (const NodeRecord* node : snapshot) {
        double spent;
        if (node->honest) {
            spent = node->power;
        } else {
            auto it = runtime_.find(node->identity_key);
            spent = (it != runtime_.end() && it->second.paid_this_iteration) ? 1.0 : 0.0;
        }
        if (keepalive_check(*node, spent, 1.0, segments_) == Keepalive::drop)
            drops.push_back(node->identity_key);
    }
    for (const IdentityKey& key : drops) {
        queue_.erase(key);
        runtime_.erase(key);
    }
    pending_drops_this_iteration_ = drops.size();
    (void)h;
}

void Simulation::process_joins(std::uint64_t h, std::vector<PendingNodeEntry>& section) {
    JoinContext ctx{segments_, config_.base_difficulty, join_anchor()};

    join_accumulator_ += config_.join_rate;
    while (join_accumulator_ >= 1.0) {
        join_accumulator_ -= 1.0;
        PowRecord pow;
        pow.prev_block_ref = ctx.expected_anchor;
        pow.identity_key = fresh_identity("honest-join", honest_join_counter_++);
        pow.occupation = choose_occupation(queue_);
        pow.claimed_difficulty = config_.base_difficulty * segments_;
        submit_join(queue_, pow, ctx, &roster_, 1.0, true);
        runtime_[pow.identity_key] = KeeperRuntime{h, 0.0, false, true};
        PendingNodeEntry entry{*pow.occupation, pow.identity_key, pow.nonce};
        section.push_back(entry);
    }

    for (const PowRecord& pow : adversary_joins_) {
        submit_join(queue_, pow, ctx, &roster_, 1.0, false);
        runtime_[pow.identity_key] = KeeperRuntime{h, 0.0, true, true};
        PendingNodeEntry entry{*pow.occupation, pow.identity_key, pow.nonce};
        section.push_back(entry);
    }
    adversary_joins_.clear();
}

IdentityKey Simulation::pick_miner(std::uint64_t h) {
    double total = 0;
    for (std::uint32_t occ = 1; occ <= config_.occupations; ++occ) {
        for (std::uint32_t seg = 1; seg <= segments_; ++seg) {
            if (!roster_.occupied(occ, seg))
                continue;
            const NodeRecord& node = roster_.at(occ, seg);
            total += node.honest
                         ? node.power
                         : (runtime_[node.identity_key].paid_this_iteration ? 1.0 : 0.0);
        }
    }
    double x = rng_mining_.next_unit() * total; // one draw per iteration
    if (total <= 0) {
        halt(h, "no eligible miner");
        return IdentityKey{};
    }
    for (std::uint32_t occ = 1; occ <= config_.occupations; ++occ) {
        for (std::uint32_t seg = 1; seg <= segments_; ++seg) {
            if (!roster_.occupied(occ, seg))
                continue;
            const NodeRecord& node = roster_.at(occ, seg);
            double w = node.honest
                           ? node.power
                           : (runtime_[node.identity_key].paid_this_iteration ? 1.0 : 0.0);
            if (w <= 0)
                continue;
            if (x < w)
                return node.identity_key;
            x -= w;
        }
    }
    // numeric edge: fall back to the last active node
    return roster_.all().back()->identity_key;
}

void Simulation::process_eliminations(std::uint64_t h) {
    auto it = elimination_pipeline_.find(h);
    if (it == elimination_pipeline_.end())
        return;
    std::vector<IdentityKey> due = std::move(it->second);
    elimination_pipeline_.erase(it);

    for (const IdentityKey& key : due) {
        elimination_scheduled_.erase(key);
        const NodeRecord* node = roster_.find(key);
        if (!node || node->status != NodeStatus::active)
            continue; // demoted or already gone in the meantime
        std::uint32_t occupation = node->occupation;
        std::uint32_t segment = *node->assigned_segment;

        EliminationOutcome outcome = eliminate_and_backfill(roster_, key, queue_);
        runtime_.erase(key);
        // unpaid storage credits still in the pipeline are forfeited
        for (auto& [due_height, list] : attestation_pipeline_)
            std::erase_if(list, [&](const StorageAttestation& att) {
                return att.keeper == key;
            });
        ++outcome_.eliminations;
        ordered_json payload{{"identity", to_hex(key)},
                             {"occupation", occupation},
                             {"segment", segment}};
        record(h, "eliminate", payload.dump());

        if (outcome.replacement) {
            ++outcome_.backfills;
            runtime_[outcome.replacement->identity_key] = KeeperRuntime{h, 0.0, false, true};
            ordered_json fill{{"identity", to_hex(outcome.replacement->identity_key)},
                              {"occupation", occupation},
                              {"segment", segment}};
            record(h, "backfill", fill.dump());
        } else {
            segments_ -= 1;
            ++outcome_.shrink_events;
            ordered_json shrink{{"dissolved_segment", outcome.dissolved_segment},
                                {"segments", segments_},
                                {"demoted", outcome.demoted.size()}};
            record(h, "shrink", shrink.dump());
            if (segments_ == 0) {
                halt(h, "all segments dissolved");
                return;
            }
            ranked_epoch(h, chain_.block_hash_at(h), "shrink");
        }
    }
}

void Simulation::try_growth(std::uint64_t h) {
    while (growth_trigger(queue_) &&
           h / (std::uint64_t(segments_) + kGrowthSegments) >= 1) {
        std::uint32_t old_s = segments_;
        std::uint32_t new_s = segments_ + kGrowthSegments;
        roster_.grow_segments(new_s);
        for (std::uint32_t occ = 1; occ <= config_.occupations; ++occ) {
            for (std::uint32_t j = 1; j <= kGrowthSegments; ++j) {
                NodeRecord node = queue_.pop_front(occ);
                roster_.place(std::move(node), old_s + j);
            }
        }
        segments_ = new_s;
        ++outcome_.growth_events;
        ordered_json payload{{"segments", segments_},
                             {"intake", kGrowthSegments * config_.occupations}};
        record(h, "grow", payload.dump());
        ranked_epoch(h, chain_.block_hash_at(h), "grow");
    }
}

void Simulation::proof_round(std::uint64_t h) {
    if (!copies_valid_ || segments_ > h)
        return; // no layout to prove against yet
    std::uint32_t due = prover_segment(h, segments_);
    const SegmentCopy& copy = copies_[due - 1];
    if (copy.tx_count() == 0)
        return; // nothing challengeable

    Digest256 bh = chain_.block_hash_at(h);
    std::span<const HeaderInfo> headers(headers_.data(), h + 1);

    AssignmentTable table;
    table.occupations = config_.occupations;
    table.segments = segments_;
    table.epoch = h;
    table.grid.reserve(std::size_t(config_.occupations) * segments_);
    for (std::uint32_t occ = 1; occ <= config_.occupations; ++occ)
        for (std::uint32_t seg = 1; seg <= segments_; ++seg)
            table.grid.push_back(roster_.at(occ, seg).identity_key);

    VerifyContext ctx{h, segments_, config_.base_difficulty};
    std::uint64_t anchor_height = h > segments_ ? h - segments_ : 0;

    for (std::uint32_t occ = 1; occ <= config_.occupations; ++occ) {
        const NodeRecord& keeper = roster_.at(occ, due);
        KeeperRuntime& rt = runtime_[keeper.identity_key];
        std::uint64_t span = h - rt.window_anchor;
        std::uint32_t owed =
            static_cast<std::uint32_t>(std::min<std::uint64_t>(segments_, span));

        std::string failure;
        bool ok = false;
        if (!rt.data_held) {
            failure = "NoData";
        } else if (keepalive_check(keeper, rt.window_spent, 1.0, owed) == Keepalive::drop) {
            failure = "InsufficientWindowPow";
        } else {
            PowRecord pow;
            pow.prev_block_ref = header_hash(headers[anchor_height].header);
            pow.identity_key = keeper.identity_key;
            pow.claimed_difficulty = config_.base_difficulty * segments_;
            StorageChallenge challenge =
                make_challenge(bh, keeper.identity_key, occ, copy);
            ProofOfStorage proof = build_proof(copy, challenge, pow);
            ProofFailure reason = ProofFailure::none;
            ok = verify_proof(proof, headers, bh, table, ctx, &reason);
            if (!ok)
                failure = proof_failure_name(reason);
        }

        if (ok) {
            ++outcome_.proofs_ok;
            attestation_pipeline_[h + 2].push_back(
                StorageAttestation{keeper.identity_key, due});
            ordered_json payload{{"identity", to_hex(keeper.identity_key)},
                                 {"occupation", occ},
                                 {"segment", due}};
            record(h, "proof_ok", payload.dump());
            rt.window_anchor = h;
            rt.window_spent = 0.0;
        } else {
            ++outcome_.proofs_failed;
            ordered_json payload{{"identity", to_hex(keeper.identity_key)},
                                 {"occupation", occ},
                                 {"segment", due},
                                 {"reason", failure}};
            record(h, "proof_fail", payload.dump());
            if (!elimination_scheduled_.contains(keeper.identity_key)) {
                elimination_scheduled_.insert(keeper.identity_key);
                elimination_pipeline_[h + 2].push_back(keeper.identity_key);
            }
        }
    }
}

void Simulation::run_iteration() {
    if (halted_)
        return;
    const std::uint64_t h = chain_.height() + 1;

    if (!previous_copies_.empty() && h > previous_expiry_)
        previous_copies_.clear();
    epoch_this_height_ = false;

    adversary_allocate(h);
    pending_keepalive(h);

    std::vector<PendingNodeEntry> section;
    process_joins(h, section);

    IdentityKey winner = pick_miner(h);
    if (halted_)
        return;

    // assemble and run the block
    Block block;
    block.header.height = static_cast<std::uint32_t>(h);
    block.header.prev_hash = chain_.block_hash_at(h - 1);
    block.header.pow_difficulty = static_cast<std::uint32_t>(config_.base_difficulty);
    block.header.timestamp = static_cast<std::uint32_t>(h);
    block.creator = winner;
    block.pending_section = std::move(section);

    const LedgerState& tip = chain_.tip_state();
    std::map<Address, std::uint64_t> spent_in_block;
    for (std::uint32_t i = 0; i < config_.txs_per_block; ++i) {
        Transaction tx;
        tx.from = accounts_[rng_txgen_.next_below(accounts_.size())];
        tx.to = accounts_[rng_txgen_.next_below(accounts_.size())];
        tx.amount = 1 + rng_txgen_.next_below(1000);
        tx.fee = static_cast<std::uint32_t>(rng_txgen_.next_below(4));
        tx.nonce = static_cast<std::uint32_t>(tx_counter_++);
        std::uint64_t debit = tx.amount + tx.fee;
        std::uint64_t already = spent_in_block[tx.from];
        if (tip.balance(tx.from) < already + debit)
            continue; // funded accounts make this unreachable in practice
        spent_in_block[tx.from] = already + debit;
        block.transactions.push_back(tx);
    }

    auto pipeline = attestation_pipeline_.find(h);
    if (pipeline != attestation_pipeline_.end()) {
        block.storage_attestations = std::move(pipeline->second);
        attestation_pipeline_.erase(pipeline);
    }

    block.seal_roots();
    chain_.append(block);
    headers_.push_back(HeaderInfo{block.header, block.transactions.size()});

    BlockCredits credits = block_credits(block, config_.rewards);
    outcome_.reward_credits[winner] += credits.creator_credit;
    for (const auto& [keeper, credit] : credits.keeper_credits)
        outcome_.reward_credits[keeper] += credit;
    outcome_.issued_supply += credits.issued();

    ordered_json payload{{"creator", to_hex(winner)},
                         {"txs", block.transactions.size()},
                         {"joins", block.pending_section.size()},
                         {"pending_drops", pending_drops_this_iteration_},
                         {"attested", block.storage_attestations.size()}};
    record(h, "block", payload.dump());

    process_eliminations(h);
    if (halted_)
        return;
    try_growth(h);
    if (config_.reassign_interval != 0 && h % config_.reassign_interval == 0 &&
        !epoch_this_height_)
        ranked_epoch(h, chain_.block_hash_at(h), "interval");
    if (!epoch_this_height_)
        refresh_copies(h, false);

    // power accrual: one iteration of grinding for every active keeper
    for (const NodeRecord* node : roster_.all()) {
        KeeperRuntime& rt = runtime_[node->identity_key];
        rt.window_spent += node->honest
                               ? node->power
                               : (rt.paid_this_iteration && !adversary_vanished_ ? 1.0 : 0.0);
    }

    proof_round(h);
    ++outcome_.iterations_run;
}

void Simulation::run() {
    for (std::uint64_t i = 0; i < config_.iterations && !halted_; ++i)
        run_iteration();
}

std::size_t Simulation::adversary_alive() const {
    std::size_t count = 0;
    for (const NodeRecord* node : roster_.all())
        if (!node->honest)
            ++count;
    for (const NodeRecord* node : queue_.all())
        if (!node->honest)
            ++count;
    return count;
}

SimOutcome Simulation::outcome() const {
    SimOutcome out = outcome_;
    out.final_height = chain_.height();
    out.final_segments = segments_;
    out.halted = halted_;
    out.halt_reason = halt_reason_;
    out.total_supply = chain_.tip_state().total_supply();
    out.roster_rows.clear();
    for (std::uint32_t occ = 1; occ <= config_.occupations; ++occ) {
        for (std::uint32_t seg = 1; seg <= segments_; ++seg) {
            if (!roster_.occupied(occ, seg))
                continue;
            const NodeRecord& node = roster_.at(occ, seg);
            out.roster_rows.push_back({to_hex(node.identity_key), std::to_string(occ),
                                       std::to_string(seg), "active",
                                       node.honest ? "1" : "0"});
        }
    }
    for (const NodeRecord* node : queue_.all())
        out.roster_rows.push_back({to_hex(node->identity_key),
                                   std::to_string(node->occupation), "", "pending",
                                   node->honest ? "1" : "0"});
    return out;
}

SimOutcome run_simulation(const SimConfig& config) {
    Simulation sim(config);
    sim.run();
    return sim.outcome();
}

} // namespace segchain
