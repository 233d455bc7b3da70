#include "infoplan/game.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>

namespace infoplan {

namespace {

void k_subsets(const IndexSet& region, int k, std::vector<IndexSet>& out) {
  const int n = static_cast<int>(region.size());
  if (k <= 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    IndexSet pts(k);
    for (int i = 0; i < k; ++i) pts[i] = region[idx[i]];
    out.push_back(std::move(pts));
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

IndexSet union_points(const JointAction& joint, int skip_agent) {
  IndexSet out;
  for (const auto& a : joint.actions) {
    if (a.agent == skip_agent) continue;
    out.insert(out.end(), a.points.begin(), a.points.end());
  }
  return out;
}

// lowest-index argmax, strict improvement only
int argmax_consistent(const std::vector<double>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace

SensingGame::SensingGame(std::shared_ptr<const InformationEngine> engine,
                         std::vector<IndexSet> regions, std::vector<int> cardinality)
    : engine_(std::move(engine)), regions_(std::move(regions)), cardinality_(std::move(cardinality)) {
  if (!engine_) throw ArgumentError("SensingGame: null engine");
  if (regions_.empty()) throw ArgumentError("SensingGame: no agents");
  if (cardinality_.size() != regions_.size())
    throw ArgumentError("SensingGame: cardinality list does not match agent count");
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    detail::require_unique(regions_[i], "region");
    for (std::size_t j = i + 1; j < regions_.size(); ++j)
      detail::require_disjoint(regions_[i], regions_[j], "regions");
    for (VariableIndex v : regions_[i])
      if (!engine_->catalog().is_sensing(v))
        throw CatalogError("region contains non-sensing index " + std::to_string(v));
  }
  action_sets_.resize(regions_.size());
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    std::vector<IndexSet> subsets;
    k_subsets(regions_[i], cardinality_[i], subsets);
    if (subsets.empty())
      throw ArgumentError("agent " + std::to_string(i) + " has an empty action set");
    for (auto& pts : subsets)
      action_sets_[i].push_back(Action{static_cast<int>(i), std::move(pts)});
  }
}

JointAction SensingGame::joint_from_ids(const std::vector<int>& action_ids) const {
  if (action_ids.size() != regions_.size())
    throw ArgumentError("joint_from_ids: wrong number of actions");
  JointAction joint;
  for (std::size_t i = 0; i < action_ids.size(); ++i)
    joint.actions.push_back(action_sets_[i].at(action_ids[i]));
  return joint;
}

void SensingGame::validate_joint(const JointAction& joint) const {
  if (static_cast<int>(joint.actions.size()) != num_agents())
    throw ArgumentError("joint action must have exactly one action per agent");
  for (int i = 0; i < num_agents(); ++i) {
    const Action& a = joint.actions[i];
    if (a.agent != i) throw ArgumentError("joint action out of agent order");
    if (static_cast<int>(a.points.size()) != cardinality_[i])
      throw ArgumentError("action cardinality mismatch for agent " + std::to_string(i));
    detail::require_unique(a.points, "action");
    for (VariableIndex v : a.points)
      if (std::find(regions_[i].begin(), regions_[i].end(), v) == regions_[i].end())
        throw ArgumentError("action point " + std::to_string(v) + " outside region of agent " + std::to_string(i));
  }
}

double SensingGame::potential(const JointAction& joint) const {
  validate_joint(joint);
  return engine_->mi(union_points(joint, -1));
}

double SensingGame::local_utility(int agent, const JointAction& joint) const {
  validate_joint(joint);
  return engine_->conditional_mi(joint.actions.at(agent).points, union_points(joint, agent));
}

double SensingGame::generalized_utility(int agent, const JointAction& joint,
                                        const std::vector<int>& j1, const std::vector<int>& j2) const {
  validate_joint(joint);
  std::vector<int> seen(num_agents(), 0);
  seen.at(agent) = 1;
  for (int j : j1) {
    if (j == agent || seen.at(j)) throw ArgumentError("generalized_utility: J1/J2/{i} not disjoint");
    seen[j] = 1;
  }
  for (int j : j2) {
    if (j == agent || seen.at(j)) throw ArgumentError("generalized_utility: J1/J2/{i} not disjoint");
    seen[j] = 1;
  }
  for (int v : seen)
    if (!v) throw ArgumentError("generalized_utility: J1 u J2 u {i} must cover all agents");

  IndexSet sel = joint.actions.at(agent).points;
  for (int j : j1)
    sel.insert(sel.end(), joint.actions[j].points.begin(), joint.actions[j].points.end());
  IndexSet given;
  for (int j : j2)
    given.insert(given.end(), joint.actions[j].points.begin(), joint.actions[j].points.end());
  return engine_->conditional_mi(sel, given);
}

JsfpResult solve_jsfp(const SensingGame& game, const JsfpOptions& opts) {
  if (!(opts.alpha_bar > 0.0 && opts.alpha_bar <= 1.0))
    throw ArgumentError("alpha_bar must be in (0,1]");
  if (opts.max_stages < 1) throw ArgumentError("max_stages must be >= 1");

  const int n = game.num_agents();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<double>> avg_utility(n), inst_utility(n);
  std::vector<int> s_star(n), s_dagger(n), s_sharp(n);
  JsfpResult res;
  long evals = 0;

  // stage 0: unconditional MI tables, local-greedy start
  for (int i = 0; i < n; ++i) {
    const auto& acts = game.actions(i);
    avg_utility[i].resize(acts.size());
    inst_utility[i].assign(acts.size(), 0.0);
    for (std::size_t a = 0; a < acts.size(); ++a)
      avg_utility[i][a] = game.engine().mi(acts[a].points);
    ++evals;  // the stage-0 unconditional table is a table computation too
    s_dagger[i] = argmax_consistent(avg_utility[i]);
    s_star[i] = s_dagger[i];
    s_sharp[i] = s_dagger[i];
  }
  auto record = [&](int t, bool conv) {
    StageRecord rec;
    rec.stage = t;
    rec.s_star = s_star;
    rec.s_dagger = s_dagger;
    rec.s_sharp = s_sharp;
    rec.best_response.assign(n, false);
    for (int i = 0; i < n; ++i) rec.best_response[i] = (s_star[i] == s_dagger[i]);
    rec.potential = game.potential(game.joint_from_ids(s_star));
    rec.cumulative_evaluations = evals;
    res.trace.stages.push_back(std::move(rec));
    (void)conv;
  };
  record(0, false);

  std::vector<int> prev_star = s_star;       // s*[t-1]
  std::vector<int> table_basis(n, -1);       // stage whose s*_{-i} the cached inst table reflects (-1: none)
  std::vector<std::vector<int>> table_opponents(n);
  double best_potential = res.trace.stages.back().potential;
  std::vector<int> best_ids = s_star;
  int extra_left = -1;

  for (int t = 1; t <= opts.max_stages; ++t) {
    std::vector<int> prev_dagger = s_dagger;
    std::vector<int> new_star(n), new_dagger(n), new_sharp(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> opponents;
      opponents.reserve(n - 1);
      for (int j = 0; j < n; ++j)
        if (j != i) opponents.push_back(prev_star[j]);
      // re-evaluate only when the opponents' committed actions changed
      if (table_basis[i] < 0 || opponents != table_opponents[i]) {
        IndexSet given;
        for (int j = 0, k = 0; j < n; ++j) {
          if (j == i) continue;
          const auto& pts = game.actions(j)[opponents[k++]].points;
          given.insert(given.end(), pts.begin(), pts.end());
        }
        const auto& acts = game.actions(i);
        for (std::size_t a = 0; a < acts.size(); ++a)
          inst_utility[i][a] = game.engine().conditional_mi(acts[a].points, given);
        table_opponents[i] = opponents;
        table_basis[i] = t;
        ++evals;
      }
      const double w = 1.0 / static_cast<double>(t);
      for (std::size_t a = 0; a < avg_utility[i].size(); ++a)
        avg_utility[i][a] = w * inst_utility[i][a] + (1.0 - w) * avg_utility[i][a];
      new_sharp[i] = argmax_consistent(inst_utility[i]);
      new_dagger[i] = argmax_consistent(avg_utility[i]);
      new_star[i] = (unit(rng) < opts.alpha_bar) ? new_dagger[i] : prev_star[i];
    }
    bool terminated = true;
    for (int i = 0; i < n; ++i)
      if (new_sharp[i] != prev_star[i] || new_sharp[i] != prev_dagger[i]) {
        terminated = false;
        break;
      }
    s_star = new_star;
    s_dagger = new_dagger;
    s_sharp = new_sharp;
    record(t, terminated);
    if (res.trace.stages.back().potential > best_potential) {
      best_potential = res.trace.stages.back().potential;
      best_ids = s_star;
    }
    prev_star = s_star;

    if (terminated && !res.converged) {
      res.converged = true;
      res.stages = t;
      res.joint = game.joint_from_ids(s_star);
      extra_left = opts.extra_stages;
    }
    if (res.converged && extra_left-- <= 0) break;
  }

  res.mi_evaluations = evals;
  res.trace.total_evaluations = evals;
  res.final_avg_utility = avg_utility;
  if (!res.converged) {
    res.stages = opts.max_stages;
    res.joint = game.joint_from_ids(best_ids);
  }
  return res;
}

std::pair<bool, double> audit_nash(const SensingGame& game, const JointAction& joint) {
  game.validate_joint(joint);
  double worst_gain = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    const double base = game.local_utility(i, joint);
    JointAction dev = joint;
    for (const Action& alt : game.actions(i)) {
      if (alt.points == joint.actions[i].points) continue;
      dev.actions[i] = alt;
      worst_gain = std::max(worst_gain, game.local_utility(i, dev) - base);
    }
  }
  return {worst_gain <= 1e-9, worst_gain};
}

JointAction solve_optimal(const SensingGame& game, unsigned long long budget) {
  const int n = game.num_agents();
  unsigned long long total = 1;
  for (int i = 0; i < n; ++i) {
    unsigned long long sz = game.actions(i).size();
    if (total > budget / sz)
      throw ArgumentError("solve_optimal: joint action space (>= " + std::to_string(total) + " x " +
                          std::to_string(sz) + ") exceeds budget of " + std::to_string(budget) +
                          " evaluations");
    total *= sz;
  }

  std::vector<int> ids(n, 0), best_ids(n, 0);
  double best = -1.0;
  IndexSet sel;
  const auto& engine = game.engine();
  while (true) {
    sel.clear();
    for (int i = 0; i < n; ++i) {
      const auto& pts = game.actions(i)[ids[i]].points;
      sel.insert(sel.end(), pts.begin(), pts.end());
    }
    double phi = engine.mi(sel);
    if (phi > best) {  // strict: lexicographically smallest kept on ties
      best = phi;
      best_ids = ids;
    }
    int i = n - 1;
    while (i >= 0 && ids[i] + 1 == static_cast<int>(game.actions(i).size())) ids[i--] = 0;
    if (i < 0) break;
    ++ids[i];
  }
  return game.joint_from_ids(best_ids);
}

JointAction solve_local_greedy(const SensingGame& game) {
  std::vector<int> ids(game.num_agents(), 0);
  for (int i = 0; i < game.num_agents(); ++i) {
    const auto& acts = game.actions(i);
    std::vector<double> vals(acts.size());
    for (std::size_t a = 0; a < acts.size(); ++a) vals[a] = game.engine().mi(acts[a].points);
    ids[i] = argmax_consistent(vals);
  }
  return game.joint_from_ids(ids);
}

JointAction solve_sequential_greedy(const SensingGame& game, const std::vector<int>& permutation) {
  const int n = game.num_agents();
  if (static_cast<int>(permutation.size()) != n)
    throw ArgumentError("permutation must list every agent once");
  std::vector<int> seen(n, 0);
  for (int p : permutation) {
    if (p < 0 || p >= n || seen.at(p)) throw ArgumentError("invalid agent permutation");
    seen[p] = 1;
  }
  std::vector<int> ids(n, 0);
  IndexSet given;
  for (int p : permutation) {
    const auto& acts = game.actions(p);
    std::vector<double> vals(acts.size());
    for (std::size_t a = 0; a < acts.size(); ++a)
      vals[a] = game.engine().conditional_mi(acts[a].points, given);
    ids[p] = argmax_consistent(vals);
    const auto& pts = acts[ids[p]].points;
    given.insert(given.end(), pts.begin(), pts.end());
  }
  return game.joint_from_ids(ids);
}

IterativeGreedyResult solve_iterative_greedy(const SensingGame& game, int max_stages) {
  const int n = game.num_agents();
  IterativeGreedyResult res;

  JointAction current = solve_local_greedy(game);
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) {
    const auto& acts = game.actions(i);
    for (std::size_t a = 0; a < acts.size(); ++a)
      if (acts[a].points == current.actions[i].points) ids[i] = static_cast<int>(a);
  }

  std::map<std::vector<int>, int> history;
  double best = game.potential(current);
  std::vector<int> best_ids = ids;
  long evals = 0;

  auto record = [&](int t) {
    StageRecord rec;
    rec.stage = t;
    rec.s_star = ids;
    rec.s_dagger = ids;
    rec.s_sharp = ids;
    rec.best_response.assign(n, true);
    rec.potential = game.potential(game.joint_from_ids(ids));
    rec.cumulative_evaluations = evals;
    if (rec.potential > best) {
      best = rec.potential;
      best_ids = ids;
    }
    res.trace.stages.push_back(std::move(rec));
  };
  record(0);
  history[ids] = 0;

  for (int t = 1; t <= max_stages; ++t) {
    std::vector<int> prev = ids;
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      IndexSet given;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto& pts = game.actions(j)[prev[j]].points;
        given.insert(given.end(), pts.begin(), pts.end());
      }
      const auto& acts = game.actions(i);
      std::vector<double> vals(acts.size());
      for (std::size_t a = 0; a < acts.size(); ++a)
        vals[a] = game.engine().conditional_mi(acts[a].points, given);
      next[i] = argmax_consistent(vals);
      ++evals;
    }
    ids = next;
    record(t);
    if (ids == prev) {
      res.converged = true;
      break;
    }
    auto it = history.find(ids);
    if (it != history.end()) {
      res.cycled = true;
      break;
    }
    history[ids] = t;
  }
  res.trace.total_evaluations = evals;
  res.joint = game.joint_from_ids(best_ids);
  return res;
}

void write_solve_trace_csv(std::ostream& os, const SensingGame& game, const SolveTrace& trace) {
  os << "stage,agent,chosen_action,best_response,potential,cumulative_mi_evaluations\n";
  char buf[64];
  for (const auto& rec : trace.stages) {
    for (int i = 0; i < game.num_agents(); ++i) {
      const auto& pts = game.actions(i)[rec.s_star[i]].points;
      os << rec.stage << ',' << i << ',';
      for (std::size_t k = 0; k < pts.size(); ++k) os << (k ? "|" : "") << pts[k];
      std::snprintf(buf, sizeof buf, "%.17g", rec.potential);
      os << ',' << (rec.best_response[i] ? 1 : 0) << ',' << buf << ',' << rec.cumulative_evaluations << '\n';
    }
  }
}

}  // namespace infoplan
