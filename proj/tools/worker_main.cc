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

// Worker process serving the synthetic target suite over stdin/stdout.

#include <cstring>
#include <iostream>

#include "catfuzz/protocol.h"
#include "catfuzz/suite.h"

int main(int argc, char** argv) {
  bool faults = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--faults") == 0) {
      faults = true;
    } else {
      std::cerr << "usage: catfuzz-worker [--faults]\n";
      return 1;
    }
  }
  catfuzz::ServeLoop(std::cin, std::cout, catfuzz::SyntheticSuite(faults));
  return 0;
}
