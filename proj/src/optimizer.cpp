#include "fuzzyembed/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "fuzzyembed/errors.hpp"
#include "fuzzyembed/random.hpp"

namespace fuzzyembed {

std::string_view loss_name(LossKind loss) { return loss == LossKind::MCC ? "mcc" : "composite"; }

LossKind parse_loss(std::string_view name) {
  if (name == "mcc" || name == "MCC") return LossKind::MCC;
  if (name == "composite" || name == "Composite") return LossKind::Composite;
  throw ConfigError(fmt::format("unknown loss '{}' (expected mcc or composite)", name));
}

void GaConfig::validate() const {
  if (max_rules < 1) throw ConfigError("max_rules must be >= 1");
  if (max_ants < 1) throw ConfigError("max_ants must be >= 1");
  if (population < 2) throw ConfigError("population must be >= 2");
  if (elitism_count > population) throw ConfigError("elitism_count exceeds population");
  if (tournament_size < 1) throw ConfigError("tournament_size must be >= 1");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
    throw ConfigError("crossover_prob must lie in [0, 1]");
  }
  if (mutation_prob && !(*mutation_prob >= 0.0 && *mutation_prob <= 1.0)) {
    throw ConfigError("mutation_prob must lie in [0, 1]");
  }
  if (!(prune_threshold >= 0.0 && prune_threshold <= 1.0)) {
    throw ConfigError("prune_threshold must lie in [0, 1]");
  }
}

nlohmann::json to_json(const GaConfig& c) {
  return {{"max_rules", c.max_rules},
          {"max_ants", c.max_ants},
          {"generations", c.generations},
          {"population", c.population},
          {"crossover_prob", c.crossover_prob},
          {"mutation_prob", c.mutation_prob ? nlohmann::json(*c.mutation_prob) : nlohmann::json()},
          {"elitism_count", c.elitism_count},
          {"tournament_size", c.tournament_size},
          {"prune_threshold", c.prune_threshold},
          {"loss", loss_name(c.loss)},
          {"seed", c.seed}};
}

GaConfig ga_config_from_json(const nlohmann::json& j, GaConfig c) {
  if (!j.is_object()) throw ConfigError("GA config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "max_rules") c.max_rules = value.get<std::size_t>();
      else if (key == "max_ants") c.max_ants = value.get<std::size_t>();
      else if (key == "generations") c.generations = value.get<std::size_t>();
      else if (key == "population") c.population = value.get<std::size_t>();
      else if (key == "crossover_prob") c.crossover_prob = value.get<double>();
      else if (key == "mutation_prob") {
        c.mutation_prob = value.is_null() ? std::nullopt : std::optional(value.get<double>());
      } else if (key == "elitism_count") c.elitism_count = value.get<std::size_t>();
      else if (key == "tournament_size") c.tournament_size = value.get<std::size_t>();
      else if (key == "prune_threshold") c.prune_threshold = value.get<double>();
      else if (key == "loss") c.loss = parse_loss(value.get<std::string>());
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else throw ConfigError(fmt::format("unknown GA config key '{}'", key));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("GA config: {}", e.what()));
  }
  c.validate();
  return c;
}

int GenomeLayout::gene_cardinality(std::size_t pos) const noexcept {
  const std::size_t slot = pos % block_size();
  if (slot == block_size() - 1) return class_count;
  return slot % 2 == 0 ? static_cast<int>(variable_count) + 1 : 3;
}

namespace {

int reduce_gene(int gene, int cardinality) {
  const int m = gene % cardinality;
  return m < 0 ? m + cardinality : m;
}

}  // namespace

RuleBase decode(const Chromosome& chromosome, const GenomeLayout& layout,
                std::span<const LinguisticVariable> variables) {
  if (chromosome.genes.size() != layout.length()) {
    throw ConfigError(fmt::format("genome has {} genes, layout expects {}",
                                  chromosome.genes.size(), layout.length()));
  }
  if (variables.size() != layout.variable_count || layout.class_count < 1) {
    throw ConfigError("genome layout does not match the variables");
  }
  const auto& g = chromosome.genes;
  std::vector<Rule> rules;
  for (std::size_t block = 0; block < layout.max_rules; ++block) {
    const std::size_t base = block * layout.block_size();
    Rule rule;
    for (std::size_t slot = 0; slot < layout.max_ants; ++slot) {
      const std::size_t pos = base + 2 * slot;
      const int var = reduce_gene(g[pos], layout.gene_cardinality(pos));
      if (var == layout.unused_variable()) continue;
      const auto v = static_cast<std::size_t>(var);
      const bool repeated = std::any_of(rule.antecedents.begin(), rule.antecedents.end(),
                                        [&](const Antecedent& a) { return a.variable == v; });
      if (repeated) continue;
      rule.antecedents.push_back({v, kLabels[static_cast<std::size_t>(reduce_gene(g[pos + 1], 3))]});
    }
    if (rule.antecedents.empty()) continue;
    const std::size_t cpos = base + layout.block_size() - 1;
    rule.consequent = reduce_gene(g[cpos], layout.gene_cardinality(cpos));
    rules.push_back(std::move(rule));
  }
  return RuleBase(std::move(rules), {variables.begin(), variables.end()}, layout.class_count,
                  layout.max_ants);
}

double mcc_binary(double tp, double tn, double fp, double fn) {
  const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / denom;
}

double mcc(std::span<const ClassIndex> predictions, std::span<const ClassIndex> truths,
           int class_count) {
  if (predictions.empty()) throw Error("mcc: empty input");
  if (predictions.size() != truths.size()) throw Error("mcc: length mismatch");
  if (class_count < 1) throw Error("mcc: class_count must be >= 1");
  const auto k = static_cast<std::size_t>(class_count);
  std::vector<double> pred_count(k, 0.0), true_count(k, 0.0);
  double correct = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const ClassIndex p = predictions[i], t = truths[i];
    if (p < 0 || p >= class_count || t < 0 || t >= class_count) {
      throw Error(fmt::format("mcc: class index outside [0, {})", class_count));
    }
    pred_count[static_cast<std::size_t>(p)] += 1.0;
    true_count[static_cast<std::size_t>(t)] += 1.0;
    if (p == t) correct += 1.0;
  }
  const double s = static_cast<double>(predictions.size());
  double pt = 0.0, pp = 0.0, tt = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    pt += pred_count[c] * true_count[c];
    pp += pred_count[c] * pred_count[c];
    tt += true_count[c] * true_count[c];
  }
  const double denom = std::sqrt((s * s - pp) * (s * s - tt));
  if (denom == 0.0) return 0.0;
  return (correct * s - pt) / denom;
}

double l1_size(const RuleBase& rb, std::size_t max_ants) {
  if (rb.empty()) throw EmptyRuleBase("l1_size: empty rule base");
  double sum = 0.0;
  for (const Rule& r : rb.rules()) {
    sum += static_cast<double>(r.antecedents.size()) / static_cast<double>(max_ants);
  }
  return sum / static_cast<double>(rb.size());
}

double l2_quality(const RuleBase& rb, double h) {
  if (rb.empty()) throw EmptyRuleBase("l2_quality: empty rule base");
  const auto& scores = rb.scores();
  const auto above = std::count_if(scores.begin(), scores.end(),
                                   [h](const RuleScore& s) { return s.dominance > h; });
  return static_cast<double>(above) / static_cast<double>(rb.size());
}

Evaluation evaluate_rulebase(RuleBase decoded, const LabeledData& data,
                             const MembershipTable& table, const GaConfig& config) {
  Evaluation ev;
  if (decoded.empty()) {
    ev.decoded_empty = true;
    ev.fitness.total = kInvalidFitnessBase;
    return ev;
  }
  decoded.score(data, table);
  const double h = config.prune_threshold;
  ev.fitness.l2 = l2_quality(decoded, h);
  double best_ds = 0.0;
  for (const auto& s : decoded.scores()) best_ds = std::max(best_ds, s.dominance);
  if (best_ds < h) {
    // Nothing survives pruning: rank by how close the best rule came.
    ev.fitness.total = kInvalidFitnessBase + (h > 0.0 ? best_ds / h : 1.0);
    return ev;
  }
  RuleBase pruned = prune(decoded, data, table, h);
  std::vector<ClassIndex> predictions(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) predictions[i] = classify(pruned, table, i).predicted;
  ev.fitness.mcc = mcc(predictions, data.labels, data.class_count);
  ev.fitness.l1 = l1_size(pruned, config.max_ants);
  ev.fitness.total = config.loss == LossKind::MCC
                         ? ev.fitness.mcc
                         : composite_fitness(ev.fitness.mcc, ev.fitness.l1, ev.fitness.l2);
  ev.pruned = std::move(pruned);
  return ev;
}

Evaluation evaluate_rulebase(RuleBase decoded, const LabeledData& data, const GaConfig& config) {
  const MembershipTable table(*data.features, decoded.variables());
  return evaluate_rulebase(std::move(decoded), data, table, config);
}

namespace {

std::size_t antecedent_total(const RuleBase& rb) {
  std::size_t n = 0;
  for (const Rule& r : rb.rules()) n += r.antecedents.size();
  return n;
}

Chromosome random_chromosome(const GenomeLayout& layout, Rng& rng) {
  Chromosome c;
  c.genes.resize(layout.length());
  for (std::size_t pos = 0; pos < c.genes.size(); ++pos) {
    c.genes[pos] = static_cast<int>(
        uniform_index(rng, static_cast<std::uint64_t>(layout.gene_cardinality(pos))));
  }
  return c;
}

std::size_t tournament(std::span<const Evaluation> evals, std::size_t size, Rng& rng) {
  std::size_t best = uniform_index(rng, evals.size());
  for (std::size_t t = 1; t < size; ++t) {
    const std::size_t challenger = uniform_index(rng, evals.size());
    const double cf = evals[challenger].fitness.total, bf = evals[best].fitness.total;
    if (cf > bf || (cf == bf && challenger < best)) best = challenger;
  }
  return best;
}

void two_point_crossover(Chromosome& a, Chromosome& b, Rng& rng) {
  const std::size_t n = a.genes.size();
  std::size_t lo = uniform_index(rng, n + 1), hi = uniform_index(rng, n + 1);
  if (lo > hi) std::swap(lo, hi);
  std::swap_ranges(a.genes.begin() + static_cast<std::ptrdiff_t>(lo),
                   a.genes.begin() + static_cast<std::ptrdiff_t>(hi),
                   b.genes.begin() + static_cast<std::ptrdiff_t>(lo));
}

void mutate(Chromosome& c, const GenomeLayout& layout, double prob, Rng& rng) {
  if (prob <= 0.0) return;
  for (std::size_t pos = 0; pos < c.genes.size(); ++pos) {
    if (uniform_real(rng) < prob) {
      c.genes[pos] = static_cast<int>(
          uniform_index(rng, static_cast<std::uint64_t>(layout.gene_cardinality(pos))));
    }
  }
}

}  // namespace

EvolutionResult evolve(const LabeledData& data, std::span<const LinguisticVariable> variables,
                       const GaConfig& config, const GenerationObserver& observer) {
  config.validate();
  if (data.size() == 0) throw ConfigError("evolve: no training samples");
  if (variables.empty()) throw ConfigError("evolve: no linguistic variables");
  const GenomeLayout layout{config.max_rules, config.max_ants, variables.size(), data.class_count};
  const double mutation_prob =
      config.mutation_prob.value_or(1.0 / static_cast<double>(layout.length()));
  const MembershipTable table(*data.features, variables);
  Rng rng(config.seed);

  auto evaluate = [&](const Chromosome& c) {
    return evaluate_rulebase(decode(c, layout, variables), data, table, config);
  };

  std::vector<Chromosome> population;
  population.reserve(config.population);
  for (std::size_t i = 0; i < config.population; ++i) {
    population.push_back(random_chromosome(layout, rng));
  }
  std::vector<Evaluation> evals;
  evals.reserve(config.population);
  for (const auto& c : population) evals.push_back(evaluate(c));

  std::optional<std::size_t> best_index;
  Chromosome best_chromosome;
  Evaluation best_eval;
  std::vector<GenerationStats> history;

  auto record = [&](std::size_t generation) {
    if (observer) observer(generation, population);
    if (std::all_of(evals.begin(), evals.end(), [](const Evaluation& e) { return e.decoded_empty; })) {
      throw DegenerateSearch(
          fmt::format("generation {}: every individual decodes to an empty rule base", generation));
    }
    std::size_t gen_best = 0;
    double valid_sum = 0.0;
    std::size_t valid_count = 0;
    for (std::size_t i = 0; i < evals.size(); ++i) {
      if (evals[i].fitness.total > evals[gen_best].fitness.total) gen_best = i;
      if (evals[i].valid()) {
        valid_sum += evals[i].fitness.total;
        ++valid_count;
      }
    }
    if (!best_index || evals[gen_best].fitness.total > best_eval.fitness.total) {
      best_index = gen_best;
      best_chromosome = population[gen_best];
      best_eval = evals[gen_best];
    }
    GenerationStats s;
    s.generation = generation;
    s.best_fitness = best_eval.fitness.total;
    s.mean_fitness = valid_count ? valid_sum / static_cast<double>(valid_count) : kInvalidFitnessBase;
    s.best_mcc = best_eval.fitness.mcc;
    if (best_eval.pruned) {
      s.rules = best_eval.pruned->size();
      s.antecedents = antecedent_total(*best_eval.pruned);
    }
    history.push_back(s);
  };

  record(0);
  for (std::size_t gen = 1; gen <= config.generations; ++gen) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return evals[a].fitness.total > evals[b].fitness.total;
    });

    std::vector<Chromosome> next;
    std::vector<Evaluation> next_evals;
    next.reserve(config.population);
    next_evals.reserve(config.population);
    for (std::size_t e = 0; e < config.elitism_count; ++e) {
      next.push_back(population[order[e]]);
      next_evals.push_back(evals[order[e]]);
    }
    while (next.size() < config.population) {
      Chromosome a = population[tournament(evals, config.tournament_size, rng)];
      Chromosome b = population[tournament(evals, config.tournament_size, rng)];
      if (uniform_real(rng) < config.crossover_prob) two_point_crossover(a, b, rng);
      mutate(a, layout, mutation_prob, rng);
      mutate(b, layout, mutation_prob, rng);
      next_evals.push_back(evaluate(a));
      next.push_back(std::move(a));
      if (next.size() < config.population) {
        next_evals.push_back(evaluate(b));
        next.push_back(std::move(b));
      }
    }
    population = std::move(next);
    evals = std::move(next_evals);
    record(gen);
  }

  if (!best_eval.valid()) {
    throw DegenerateSearch(fmt::format("no individual produced a rule with dominance >= {}",
                                       config.prune_threshold));
  }
  return {std::move(*best_eval.pruned), best_eval.fitness, std::move(best_chromosome),
          std::move(history)};
}

std::string history_csv(std::span<const GenerationStats> history) {
  std::string out = "generation,best_fitness,mean_fitness,best_mcc,rules,antecedents\n";
  for (const auto& s : history) {
    out += fmt::format("{},{},{},{},{},{}\n", s.generation, s.best_fitness, s.mean_fitness,
                       s.best_mcc, s.rules, s.antecedents);
  }
  return out;
}

}  // namespace fuzzyembed
