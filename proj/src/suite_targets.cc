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

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "catfuzz/suite.h"

namespace catfuzz {

void PlantedCrash(const std::string& site) {
  std::fprintf(stderr, "#0 %s\n", site.c_str());
  std::fflush(stderr);
  std::abort();
}

namespace {

[[noreturn]] void Raise(const char* cls, const std::string& message) {
  throw TargetException(cls, message);
}

bool IsTensor(const Materialized& m) { return m.type_name == "Tensor"; }

const TensorData& RequireTensor(const Materialized& m, const char* what) {
  if (!IsTensor(m)) {
    Raise("TypeError", std::string(what) + " must be a Tensor, got " + m.type_name);
  }
  return m.view.tensor();
}

bool HasPrefix(const std::string& s, const char* p) { return s.rfind(p, 0) == 0; }
bool IntDtype(const std::string& d) { return HasPrefix(d, "int") || HasPrefix(d, "uint"); }
bool QuantizedDtype(const std::string& d) {
  return HasPrefix(d, "qint") || HasPrefix(d, "quint");
}
bool FloatDtype(const std::string& d) {
  return HasPrefix(d, "float") || HasPrefix(d, "bfloat") || d == "half" ||
         d == "double";
}

bool IsInt(const Materialized& m) { return m.view.kind() == ValueKind::kInt; }
bool IsNumber(const Materialized& m) {
  return m.view.kind() == ValueKind::kInt || m.view.kind() == ValueKind::kFloat;
}
bool IsIntList(const Materialized& m) {
  if (m.type_name != "list") return false;
  for (const Value& v : m.view.items()) {
    if (v.kind() != ValueKind::kInt) return false;
  }
  return true;
}

int64_t Rank(const TensorData& t) { return static_cast<int64_t>(t.shape.size()); }
int64_t Elements(const TensorData& t) {
  int64_t n = 1;
  for (int64_t d : t.shape) n *= d;
  return n;
}

// Element-wise lower / upper bound checks over a tensor or numeric nest.
// Non-numeric content fails the check.
bool Flatten(const Value& v, std::vector<double>& out) {
  if (v.is_number()) {
    out.push_back(v.number());
    return true;
  }
  if (v.kind() != ValueKind::kSequence) return false;
  for (const Value& item : v.items()) {
    if (!Flatten(item, out)) return false;
  }
  return true;
}

template <typename Pred>
bool EveryElement(const Value& v, Pred pred, bool use_max) {
  if (v.kind() == ValueKind::kTensor) {
    const TensorData& t = v.tensor();
    if (t.data) {
      for (double x : *t.data) {
        if (!pred(x)) return false;
      }
      return true;
    }
    if (t.stats.element_count == 0) return true;
    if (t.stats.has_nan) return false;
    const auto& bound = use_max ? t.stats.max : t.stats.min;
    return bound && pred(*bound);
  }
  std::vector<double> flat;
  if (v.kind() != ValueKind::kSequence || !Flatten(v, flat)) return false;
  for (double x : flat) {
    if (!pred(x)) return false;
  }
  return true;
}

bool AllAtLeast(const Value& v, double c) {
  return EveryElement(v, [c](double x) { return x >= c; }, false);
}
bool AllAbove(const Value& v, double c) {
  return EveryElement(v, [c](double x) { return x > c; }, false);
}
bool AllAtMost(const Value& v, double c) {
  return EveryElement(v, [c](double x) { return x <= c; }, true);
}

bool TensorHasNan(const TensorData& t) {
  if (!t.data) return t.stats.has_nan;
  for (double x : *t.data) {
    if (std::isnan(x)) return true;
  }
  return false;
}

bool TensorHasInf(const TensorData& t) {
  if (!t.data) return t.stats.has_inf;
  for (double x : *t.data) {
    if (std::isinf(x)) return true;
  }
  return false;
}

int64_t SeqLen(const Materialized& m) {
  return static_cast<int64_t>(m.view.items().size());
}

std::vector<SyntheticTarget> MakeSuite() {
  using A = std::span<const Materialized>;
  std::vector<SyntheticTarget> s;

  s.push_back({"rank4_sum", {"x"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "x");
    if (Rank(x) != 4) Raise("RankError", "expected rank 4, got " + std::to_string(Rank(x)));
    if (TensorHasNan(x)) PlantedCrash("rank4_sum_nan");
  }});

  s.push_back({"positive_mean", {"x"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "x");
    if (Elements(x) == 0) Raise("ValueError", "mean of empty tensor");
    if (!AllAbove(a[0].view, 0)) Raise("ValueRangeError", "elements must be positive");
    if (Rank(x) == 3) PlantedCrash("positive_mean_rank3");
  }});

  s.push_back({"placeholder_like", {"x", "shape"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "x");
    const Materialized& shape = a[1];
    int64_t shape_len = -1;
    if (shape.type_name == "TensorShape" || IsIntList(shape)) {
      shape_len = SeqLen(shape);
    } else if (IsTensor(shape) && Rank(shape.view.tensor()) == 1 &&
               (IntDtype(shape.view.tensor().dtype) ||
                QuantizedDtype(shape.view.tensor().dtype))) {
      if (shape.view.tensor().dtype == "qint32") {
        PlantedCrash("placeholder_like_qint32");
      }
      shape_len = shape.view.tensor().shape[0];
    } else {
      Raise("TypeError", "shape must be a TensorShape or a list of int");
    }
    if (shape_len != Rank(x)) Raise("ValueError", "Shapes must be equal rank");
  }});

  s.push_back({"matmul2", {"a", "b"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "a");
    const TensorData& y = RequireTensor(a[1], "b");
    if (Rank(x) != 2 || Rank(y) != 2) Raise("RankError", "matmul2 needs matrices");
    if (x.shape[1] != y.shape[0]) Raise("DimensionMismatch", "inner dimensions differ");
    if (x.shape[0] == 0) PlantedCrash("matmul2_empty");
  }});

  s.push_back({"safe_divide", {"x", "y"}, [](A a) {
    if (!IsNumber(a[0]) || !IsNumber(a[1])) Raise("TypeError", "operands must be numbers");
    if (a[1].view.number() == 0) {
      if (IsInt(a[0]) && IsInt(a[1])) PlantedCrash("safe_divide_int_zero");
      Raise("ZeroDivisionError", "division by zero");
    }
  }});

  s.push_back({"one_hot", {"indices", "depth"}, [](A a) {
    if (!IsTensor(a[0]) || !IntDtype(a[0].view.tensor().dtype)) {
      Raise("TypeError", "indices must be an integer Tensor");
    }
    if (!IsInt(a[1])) Raise("TypeError", "depth must be int");
    if (a[1].view.as_int() <= 0) Raise("ValueError", "depth must be positive");
    if (!AllAtLeast(a[0].view, 0)) PlantedCrash("one_hot_negative");
  }});

  s.push_back({"string_split", {"s", "sep"}, [](A a) {
    if (a[0].type_name != "str" || a[1].type_name != "str") {
      Raise("TypeError", "expected strings");
    }
    if (a[1].view.as_string().empty()) PlantedCrash("string_split_empty_sep");
  }});

  s.push_back({"gather", {"params", "indices"}, [](A a) {
    const TensorData& p = RequireTensor(a[0], "params");
    const Materialized& idx = a[1];
    const bool int_tensor = IsTensor(idx) && IntDtype(idx.view.tensor().dtype);
    if (!int_tensor && !IsIntList(idx)) Raise("TypeError", "indices must be integers");
    if (!AllAtLeast(idx.view, 0)) Raise("InvalidArgumentError", "negative index");
    if (Elements(p) == 0) PlantedCrash("gather_empty_params");
  }});

  s.push_back({"transpose", {"x", "perm"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "x");
    if (!IsIntList(a[1])) Raise("TypeError", "perm must be a list of int");
    if (SeqLen(a[1]) != Rank(x)) Raise("ValueError", "perm length must equal rank");
    for (const Value& v : a[1].view.items()) {
      if (v.as_int() < 0) PlantedCrash("transpose_negative_perm");
    }
  }});

  s.push_back({"adversarial_deep", {"a", "b", "c"}, [](A a) {
    if (!IsInt(a[0])) Raise("TypeError", "a must be int");
    if (a[0].view.as_int() < 0) Raise("ValueError", "a must be non-negative");
    if (a[1].type_name != "str") Raise("TypeError", "b must be str");
    const TensorData& c = RequireTensor(a[2], "c");
    if (TensorHasNan(c)) PlantedCrash("adversarial_deep_nan");
  }});

  s.push_back({"adversarial_chain", {"x", "k"}, [](A a) {
    if (!IsIntList(a[0])) Raise("TypeError", "x must be a list of int");
    if (!IsInt(a[1])) Raise("TypeError", "k must be int");
    const int64_t k = a[1].view.as_int();
    if (k < 0) Raise("IndexError", "k out of range");
    if (SeqLen(a[0]) > 2 && SeqLen(a[0]) == k) PlantedCrash("adversarial_chain_len");
  }});

  s.push_back({"fill", {"dims", "value"}, [](A a) {
    if (a[0].type_name != "TensorShape" && !IsIntList(a[0])) {
      Raise("TypeError", "dims must be a shape");
    }
    for (const Value& d : a[0].view.items()) {
      if (d.as_int() < 0) Raise("ValueError", "negative dimension");
    }
    const bool is_bool = a[1].view.kind() == ValueKind::kBool;
    if (!is_bool && !IsNumber(a[1])) Raise("TypeError", "value must be a scalar");
    if (is_bool) PlantedCrash("fill_bool");
  }});

  s.push_back({"reduce_sum", {"x", "axis"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "x");
    if (!IsInt(a[1])) Raise("TypeError", "axis must be int");
    const int64_t axis = a[1].view.as_int();
    if (Rank(x) == 0 && axis == 0) PlantedCrash("reduce_sum_scalar");
    if (axis < 0) Raise("ValueError", "negative axis");
    if (axis >= Rank(x)) Raise("InvalidArgumentError", "axis out of range");
  }});

  s.push_back({"slice_seq", {"x", "begin"}, [](A a) {
    if (a[0].type_name != "list") Raise("TypeError", "x must be a list");
    if (!IsInt(a[1])) Raise("TypeError", "begin must be int");
    const int64_t begin = a[1].view.as_int();
    if (SeqLen(a[0]) == 0 && begin < 0) PlantedCrash("slice_seq_empty_negative");
    if (begin > SeqLen(a[0])) Raise("IndexError", "begin past end");
  }});

  s.push_back({"pad", {"x", "paddings"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "x");
    const Materialized& p = a[1];
    bool nested = false;
    if (p.type_name == "list") {
      for (const Value& v : p.view.items()) {
        nested = nested || v.kind() == ValueKind::kSequence;
      }
    }
    if (!nested) Raise("TypeError", "paddings must be a nested list");
    if (!AllAtLeast(p.view, 0)) PlantedCrash("pad_negative");
    if (SeqLen(p) != Rank(x)) Raise("ValueError", "paddings must match rank");
  }});

  s.push_back({"histogram", {"values", "nbins"}, [](A a) {
    if (!IsTensor(a[0]) || !FloatDtype(a[0].view.tensor().dtype)) {
      Raise("TypeError", "values must be a floating Tensor");
    }
    if (!IsInt(a[1])) Raise("TypeError", "nbins must be int");
    if (a[1].view.as_int() <= 0) Raise("ValueError", "nbins must be positive");
    if (TensorHasInf(a[0].view.tensor())) PlantedCrash("histogram_inf");
  }});

  s.push_back({"det", {"x"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "x");
    if (Rank(x) < 2) Raise("RankError", "det needs rank >= 2");
    if (x.shape[x.shape.size() - 1] != x.shape[x.shape.size() - 2]) {
      Raise("ValueError", "matrix must be square");
    }
    if (IntDtype(x.dtype)) PlantedCrash("det_int");
  }});

  s.push_back({"norm", {"x", "ord"}, [](A a) {
    RequireTensor(a[0], "x");
    if (!IsNumber(a[1])) Raise("TypeError", "ord must be a number");
    if (!(a[1].view.number() > 0)) Raise("ValueError", "ord must be positive");
  }});

  s.push_back({"concat", {"a", "b"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "a");
    const TensorData& y = RequireTensor(a[1], "b");
    if (Rank(x) != Rank(y)) Raise("ValueError", "ranks differ");
    if (QuantizedDtype(x.dtype)) PlantedCrash("concat_quantized");
  }});

  s.push_back({"range_tensor", {"start", "limit"}, [](A a) {
    if (!IsNumber(a[0]) || !IsNumber(a[1])) Raise("TypeError", "bounds must be numbers");
    const double start = a[0].view.number();
    const double limit = a[1].view.number();
    if (!(start <= limit)) Raise("ValueError", "start exceeds limit");
    if (a[0].view.kind() == ValueKind::kFloat && start == limit) {
      PlantedCrash("range_tensor_float_empty");
    }
  }});

  s.push_back({"conv_like", {"x", "filters"}, [](A a) {
    const TensorData& x = RequireTensor(a[0], "x");
    const TensorData& f = RequireTensor(a[1], "filters");
    if (Rank(x) != 4 || Rank(f) != 4) Raise("RankError", "conv needs rank-4 operands");
    if (x.shape[3] != f.shape[2]) Raise("DimensionMismatch", "channel mismatch");
    if (Elements(f) > 0 && AllAtMost(a[1].view, 0) && AllAtLeast(a[1].view, 0)) {
      PlantedCrash("conv_like_zero_filter");
    }
  }});

  s.push_back({"bincount", {"arr"}, [](A a) {
    const bool int_tensor = IsTensor(a[0]) && IntDtype(a[0].view.tensor().dtype);
    if (!int_tensor && !IsIntList(a[0])) Raise("TypeError", "arr must be integers");
    if (!AllAtLeast(a[0].view, 0)) Raise("InvalidArgumentError", "negative count");
  }});

  return s;
}

// Fault injection: each misbehaves when its argument is the bool `true`.
std::vector<SyntheticTarget> MakeFaults() {
  using A = std::span<const Materialized>;
  auto armed = [](A a) {
    return a[0].view.kind() == ValueKind::kBool && a[0].view.as_bool();
  };
  std::vector<SyntheticTarget> s;
  s.push_back({"fault_abort", {"x"}, [armed](A a) {
    if (armed(a)) PlantedCrash("fault_abort");
  }});
  s.push_back({"fault_segv", {"x"}, [armed](A a) {
    if (armed(a)) {
      std::fprintf(stderr, "#0 fault_segv\n");
      std::fflush(stderr);
      std::raise(SIGSEGV);
    }
  }});
  s.push_back({"fault_exit", {"x"}, [armed](A a) {
    if (armed(a)) _exit(3);
  }});
  s.push_back({"fault_clean_exit", {"x"}, [armed](A a) {
    if (armed(a)) _exit(0);
  }});
  s.push_back({"fault_hang", {"x"}, [armed](A a) {
    while (armed(a)) std::this_thread::sleep_for(std::chrono::seconds(1));
  }});
  s.push_back({"fault_garbage", {"x"}, [armed](A a) {
    if (armed(a)) {
      std::fputs("this is not a response\n", stdout);
      std::fflush(stdout);
    }
  }});
  return s;
}

}  // namespace

const std::vector<SyntheticTarget>& SyntheticSuite(bool faults) {
  static const std::vector<SyntheticTarget> kSuite = MakeSuite();
  static const std::vector<SyntheticTarget> kWithFaults = [] {
    std::vector<SyntheticTarget> all = MakeSuite();
    for (auto& f : MakeFaults()) all.push_back(std::move(f));
    return all;
  }();
  return faults ? kWithFaults : kSuite;
}

const SyntheticTarget* FindSyntheticTarget(std::string_view name, bool faults) {
  for (const SyntheticTarget& t : SyntheticSuite(faults)) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

}  // namespace catfuzz
