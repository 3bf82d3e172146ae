// Copyright 2026 The Catfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "catfuzz/report.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace catfuzz {

using nlohmann::json;

std::vector<CrashGroup> DedupCrashes(const ExecutionLog& log) {
  std::map<std::pair<std::string, std::string>, size_t> index;
  std::vector<CrashGroup> groups;
  std::vector<const LogRecord*> crashes;
  for (const LogRecord& r : log.records) {
    if (r.outcome == OutcomeKind::kCrash) crashes.push_back(&r);
  }
  std::sort(crashes.begin(), crashes.end(),
            [](const LogRecord* a, const LogRecord* b) {
              return a->case_id < b->case_id;
            });
  for (const LogRecord* r : crashes) {
    auto key = std::pair(r->function, r->detail);
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) {
      groups.push_back(CrashGroup{r->function, r->detail, r->case_id, {}});
    }
    groups[it->second].members.push_back(r->case_id);
  }
  return groups;
}

namespace {

struct Bound {
  std::string measure;
  char rel;  // one of < <= > >= ==, encoded as l L g G e
  double value;
};

std::optional<Bound> AsBound(const Catalog& catalog, size_t ordinal) {
  static const std::map<std::string, std::pair<std::string, char>> kRel = {
      {"lt", {"x", 'l'}},        {"le", {"x", 'L'}},
      {"gt", {"x", 'g'}},        {"ge", {"x", 'G'}},
      {"eq", {"x", 'e'}},        {"all_lt", {"all", 'l'}},
      {"all_le", {"all", 'L'}},  {"all_gt", {"all", 'g'}},
      {"all_ge", {"all", 'G'}},  {"len_lt", {"len", 'l'}},
      {"len_eq", {"len", 'e'}},  {"len_gt", {"len", 'g'}},
      {"size_lt", {"size", 'l'}}, {"size_eq", {"size", 'e'}},
      {"size_gt", {"size", 'g'}}, {"rank_lt", {"rank", 'l'}},
      {"rank_eq", {"rank", 'e'}}, {"rank_gt", {"rank", 'g'}},
      {"dim_eq", {"dim", 'e'}},  {"dim_gt", {"dim", 'g'}},
  };
  const PropertyInstance& inst = catalog.at(ordinal);
  auto it = kRel.find(inst.template_id);
  if (it == kRel.end() || inst.constants.empty()) return std::nullopt;
  const Value& last = inst.constants.back();
  if (!last.is_number()) return std::nullopt;
  std::string measure = it->second.first;
  for (size_t i = 0; i + 1 < inst.constants.size(); ++i) {
    measure += "/" + Encode(inst.constants[i]);
  }
  return Bound{measure, it->second.second, last.number()};
}

// Whether q being true makes p redundant in a description.
bool Subsumes(const Catalog& catalog, size_t q, size_t p) {
  const auto& implied = catalog.Implied(q);
  if (std::binary_search(implied.begin(), implied.end(), p)) return true;
  const std::string& tq = catalog.at(q).template_id;
  const std::string& tp = catalog.at(p).template_id;
  if (tp == "not_none" && tq == "type_eq") return true;
  if ((tp == "dtype_float" || tp == "dtype_int") && tq == "dtype_eq") return true;
  auto bq = AsBound(catalog, q);
  auto bp = AsBound(catalog, p);
  if (!bq || !bp || bq->measure != bp->measure) return false;
  if (bq->rel == 'e') return bp->rel != 'e';
  switch (bq->rel) {
    case 'l': return bp->rel == 'L' && bq->value <= bp->value;
    case 'L': return bp->rel == 'l' && bq->value < bp->value;
    case 'g': return bp->rel == 'G' && bq->value >= bp->value;
    case 'G': return bp->rel == 'g' && bq->value > bp->value;
  }
  return false;
}

}  // namespace

std::string DescribeCategory(const InputDatabase& db, size_t category) {
  const Catalog& catalog = db.catalog();
  const Bitset& props = db.lattice().category(category).props;
  const std::vector<size_t> ones = props.Ones();
  std::string out;
  for (size_t p : ones) {
    bool redundant = false;
    for (size_t q : ones) {
      // Mutual subsumption keeps the lower ordinal.
      if (q == p || !Subsumes(catalog, q, p)) continue;
      if (Subsumes(catalog, p, q) && p < q) continue;
      redundant = true;
      break;
    }
    if (redundant) continue;
    if (!out.empty()) out += " and ";
    out += catalog.Describe(p);
  }
  return out.empty() ? "true" : out;
}

namespace {

int PhaseRank(const std::string& phase) {
  if (phase == "random") return 0;
  if (phase == "inference") return 1;
  if (phase == "inference-failed") return 2;
  return 3;
}

double Fraction(uint64_t num, uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Report ComputeReport(const ExecutionLog& log, const InputDatabase& db) {
  Report rep;
  rep.catalog_size = db.catalog().size();
  Bitset covered(rep.catalog_size);
  std::set<std::string> with_valid;
  std::set<std::pair<std::string, std::string>> accepted_seen;

  for (const json& t : log.header.at("targets")) {
    const std::string name = t.at("name").get<std::string>();
    for (const json& p : t.at("params")) rep.phases[name][p.get<std::string>()] = "random";
  }
  rep.functions = rep.phases.size();

  for (const LogRecord& r : log.records) {
    if (!r.outcome) {
      ++rep.outcomes["discarded"];
      continue;
    }
    ++rep.cases;
    ++rep.outcomes[std::string(OutcomeName(*r.outcome))];
    for (const LogArg& a : r.args) covered |= db.input(a.input).fingerprint.bits;
    const bool valid = *r.outcome == OutcomeKind::kValid;
    if (valid) {
      ++rep.valid;
      with_valid.insert(r.function);
    }
    if (r.phase == Phase::kValidGeneration) {
      ++rep.valid_gen_cases;
      rep.valid_gen_valid += valid;
    }
    if (r.param != "*") {
      std::string phase(PhaseName(r.phase));
      if (r.provenance == "inference-failed") phase = "inference-failed";
      std::string& best = rep.phases[r.function][r.param];
      if (PhaseRank(phase) > PhaseRank(best)) best = phase;
      if (r.phase == Phase::kValidGeneration &&
          accepted_seen.emplace(r.function, r.param).second) {
        AcceptedHypothesis h{r.function, r.param, r.hypothesis, ""};
        for (size_t i = 0; i < h.categories.size(); ++i) {
          if (i) h.text += " OR ";
          h.text += "(" + DescribeCategory(db, h.categories[i]) + ")";
        }
        rep.accepted.push_back(std::move(h));
      }
    }
  }
  rep.covered_properties = covered.Count();
  rep.property_coverage = Fraction(rep.covered_properties, rep.catalog_size);
  rep.functions_with_valid = with_valid.size();
  rep.api_coverage = Fraction(rep.functions_with_valid, rep.functions);
  rep.valid_rate = Fraction(rep.valid, rep.cases);
  rep.valid_gen_rate = Fraction(rep.valid_gen_valid, rep.valid_gen_cases);
  rep.crash_groups = DedupCrashes(log);
  for (const json& e : log.events) {
    if (e.value("event", "") == "quarantine") {
      rep.early_crashers.push_back(e.at("function").get<std::string>());
    }
  }
  std::sort(rep.accepted.begin(), rep.accepted.end(),
            [](const AcceptedHypothesis& a, const AcceptedHypothesis& b) {
              return std::pair(a.function, a.param) < std::pair(b.function, b.param);
            });
  return rep;
}

json Report::ToJson() const {
  json groups = json::array();
  for (const CrashGroup& g : crash_groups) {
    groups.push_back(json{{"function", g.function},
                          {"detail", g.detail},
                          {"representative", g.representative},
                          {"members", g.members}});
  }
  json accepted_json = json::array();
  for (const AcceptedHypothesis& h : accepted) {
    accepted_json.push_back(json{{"function", h.function},
                                 {"param", h.param},
                                 {"categories", h.categories},
                                 {"text", h.text}});
  }
  return json{{"property_coverage", property_coverage},
              {"covered_properties", covered_properties},
              {"catalog_size", catalog_size},
              {"api_coverage", api_coverage},
              {"functions", functions},
              {"functions_with_valid", functions_with_valid},
              {"cases", cases},
              {"valid", valid},
              {"valid_rate", valid_rate},
              {"valid_generation_cases", valid_gen_cases},
              {"valid_generation_valid", valid_gen_valid},
              {"valid_generation_rate", valid_gen_rate},
              {"outcomes", outcomes},
              {"crash_groups", std::move(groups)},
              {"phases", phases},
              {"accepted_hypotheses", std::move(accepted_json)},
              {"early_crashers", early_crashers}};
}

std::string Report::ToText() const {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "cases             %llu\n",
                static_cast<unsigned long long>(cases));
  out << buf;
  std::snprintf(buf, sizeof(buf), "property coverage %.4f (%zu/%zu)\n",
                property_coverage, covered_properties, catalog_size);
  out << buf;
  std::snprintf(buf, sizeof(buf), "api coverage      %.4f (%zu/%zu)\n",
                api_coverage, functions_with_valid, functions);
  out << buf;
  std::snprintf(buf, sizeof(buf), "valid rate        %.4f\n", valid_rate);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "valid-gen rate    %.4f (%llu/%llu)\n", valid_gen_rate,
                static_cast<unsigned long long>(valid_gen_valid),
                static_cast<unsigned long long>(valid_gen_cases));
  out << buf;
  out << "outcomes:";
  for (const auto& [k, n] : outcomes) out << " " << k << "=" << n;
  out << "\n\ncrash groups (" << crash_groups.size() << "):\n";
  for (const CrashGroup& g : crash_groups) {
    out << "  " << g.function << "  " << g.detail << "  first=" << g.representative
        << " count=" << g.members.size() << "\n";
  }
  out << "\nphases:\n";
  for (const auto& [fn, params] : phases) {
    out << "  " << fn << ":";
    for (const auto& [p, phase] : params) out << " " << p << "=" << phase;
    out << "\n";
  }
  out << "\naccepted hypotheses:\n";
  for (const AcceptedHypothesis& h : accepted) {
    out << "  " << h.function << "." << h.param << ": " << h.text << "\n";
  }
  if (!early_crashers.empty()) {
    out << "\nearly crashers:";
    for (const std::string& f : early_crashers) out << " " << f;
    out << "\n";
  }
  return out.str();
}

}  // namespace catfuzz
