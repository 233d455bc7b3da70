#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "infoplan/engine.hpp"

namespace infoplan {

/// One agent's choice: n_i sensing points inside its region.
struct Action {
  int agent = 0;
  IndexSet points;  // ascending catalog indices
};

/// Exactly one action per agent, agent i at position i.
struct JointAction {
  std::vector<Action> actions;
};

/// Finite sensing game: per-agent k-subset action sets over disjoint regions,
/// utilities evaluated through a shared information engine.
class SensingGame {
 public:
  SensingGame(std::shared_ptr<const InformationEngine> engine,
              std::vector<IndexSet> regions, std::vector<int> cardinality);

  int num_agents() const { return static_cast<int>(regions_.size()); }
  const std::vector<Action>& actions(int agent) const { return action_sets_.at(agent); }
  const IndexSet& region(int agent) const { return regions_.at(agent); }
  const InformationEngine& engine() const { return *engine_; }
  std::shared_ptr<const InformationEngine> engine_ptr() const { return engine_; }

  JointAction joint_from_ids(const std::vector<int>& action_ids) const;

  /// phi = I(V; Z_{s_1..s_N})
  double potential(const JointAction& joint) const;

  /// U_i = I(V; Z_{s_i} | Z_{s_-i})
  double local_utility(int agent, const JointAction& joint) const;

  /// U_i = I(V; Z_{s_i}, Z_{s_J1} | Z_{s_J2}) for any split with
  /// J1 u J2 u {i} = all agents and J1, J2, {i} pairwise disjoint.
  double generalized_utility(int agent, const JointAction& joint,
                             const std::vector<int>& j1, const std::vector<int>& j2) const;

  void validate_joint(const JointAction& joint) const;

 private:
  std::shared_ptr<const InformationEngine> engine_;
  std::vector<IndexSet> regions_;
  std::vector<int> cardinality_;
  std::vector<std::vector<Action>> action_sets_;
};

struct StageRecord {
  int stage = 0;
  std::vector<int> s_star;    // chosen action ids, one per agent
  std::vector<int> s_dagger;  // best responses to averaged utilities
  std::vector<int> s_sharp;   // instantaneous best responses
  std::vector<bool> best_response;  // agent adopted its best response this stage
  double potential = 0.0;
  long cumulative_evaluations = 0;
};

struct SolveTrace {
  std::vector<StageRecord> stages;
  long total_evaluations = 0;
};

struct JsfpOptions {
  double alpha_bar = 0.3;
  std::uint64_t seed = 0;
  int max_stages = 200;
  /// Forced stages run past the termination condition (fixed-point audits).
  int extra_stages = 0;
};

struct JsfpResult {
  JointAction joint;
  SolveTrace trace;
  bool converged = false;
  int stages = 0;             // stage index at termination
  long mi_evaluations = 0;    // per-agent utility-table recomputations
  /// Final averaged utility tables, one value per agent per action; equals
  /// the arithmetic mean of the instantaneous utilities over stages 1..T.
  std::vector<std::vector<double>> final_avg_utility;
};

/// Algorithm: averaged-utility JSFP with inertia. Initial utilities are the
/// unconditional MI values (local-greedy start); stage t >= 1 blends the
/// instantaneous table with weight 1/t. With probability alpha_bar an agent
/// adopts its best response, otherwise it repeats its previous action.
/// Terminates when, for all i, s_sharp_i[t] == s_star_i[t-1] and
/// s_sharp_i[t] == s_dagger_i[t-1]. All argmax ties break to the lowest
/// action index. On stage exhaustion returns the best-seen joint action
/// with converged = false.
JsfpResult solve_jsfp(const SensingGame& game, const JsfpOptions& opts);

/// True iff no unilateral deviation improves local utility by more than 1e-9;
/// second element is the largest improvement found.
std::pair<bool, double> audit_nash(const SensingGame& game, const JointAction& joint);

/// Exact argmax of the potential by enumeration; lexicographically smallest
/// joint action on ties. Refuses when the joint action count exceeds budget.
JointAction solve_optimal(const SensingGame& game, unsigned long long budget = 10'000'000ULL);

/// Each agent independently maximizes the MI of its own selection.
JointAction solve_local_greedy(const SensingGame& game);

/// Agents decide in the given order, each maximizing MI conditioned on the
/// predecessors' selections.
JointAction solve_sequential_greedy(const SensingGame& game, const std::vector<int>& permutation);

struct IterativeGreedyResult {
  JointAction joint;  // best joint action seen
  bool cycled = false;
  bool converged = false;
  SolveTrace trace;
};

/// Simultaneous one-step look-back best response; detects joint-action cycles.
IterativeGreedyResult solve_iterative_greedy(const SensingGame& game, int max_stages = 200);

/// CSV columns: stage,agent,chosen_action,best_response,potential,cumulative_mi_evaluations.
/// Action points are '|'-joined catalog indices.
void write_solve_trace_csv(std::ostream& os, const SensingGame& game, const SolveTrace& trace);

}  // namespace infoplan
