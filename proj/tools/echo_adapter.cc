// Copyright 2026 The topaug Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference adapter for the line protocol.
//
//   echo_adapter generate [mode]   fills every [mask] of the source with w<i>
//   echo_adapter parse [mode]      answers [IN:ECHO <utterance> ]
//
// Modes other than "ok" misbehave on purpose:
//   reverse        answers every request, in reverse order, after EOF
//   short          one response too few per request
//   extra          one response too many per request
//   garbage        a non-JSON line
//   wrong-id       ids shifted by 1000
//   bad-field      responses without the payload field
//   unknown-label  generate only: candidates use an unseen label
//   crash          exits with status 3 after the first response
//   exit-nonzero   answers everything, then exits with status 1
//   hang           reads one request and stops answering

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

namespace {

using Json = nlohmann::json;

std::string Fill(const std::string &source, int i, bool unknown_label) {
  std::istringstream in(source);
  std::string word, out;
  bool first = true;
  while (in >> word) {
    if (word == "[mask]") word = "w" + std::to_string(i);
    if (unknown_label && first) word = "[in:no_such_label";
    if (unknown_label && in.peek() == EOF) word = "in:no_such_label]";
    if (!out.empty()) out += " ";
    out += word;
    first = false;
  }
  return out;
}

std::vector<Json> Answer(const Json &request, bool generate,
                         const std::string &mode) {
  int64_t id = request.at("id").get<int64_t>();
  if (mode == "wrong-id") id += 1000;
  std::vector<Json> out;
  if (generate) {
    int k = request.at("k").get<int>();
    if (mode == "short") --k;
    if (mode == "extra") ++k;
    const std::string source = request.at("source").get<std::string>();
    for (int i = 0; i < k; ++i) {
      Json r = {{"id", id}};
      if (mode != "bad-field") {
        r["candidate"] = Fill(source, i, mode == "unknown-label");
      }
      out.push_back(r);
    }
  } else {
    Json r = {{"id", id}};
    if (mode != "bad-field") {
      r["tree"] = "[IN:ECHO " + request.at("utterance").get<std::string>() + " ]";
    }
    out.push_back(r);
    if (mode == "extra") out.push_back(r);
    if (mode == "short") out.clear();
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  const std::string role = argc > 1 ? argv[1] : "generate";
  const std::string mode = argc > 2 ? argv[2] : "ok";
  if (role != "generate" && role != "parse") {
    std::cerr << "usage: echo_adapter generate|parse [mode]\n";
    return 2;
  }
  const bool generate = role == "generate";
  std::vector<std::string> buffered;
  std::string line;
  bool answered = false;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    if (mode == "hang") {
      std::this_thread::sleep_for(std::chrono::hours(1));
      return 0;
    }
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    for (const Json &r : Answer(Json::parse(line), generate, mode)) {
      if (mode == "reverse") {
        buffered.push_back(r.dump());
        continue;
      }
      std::cout << r.dump() << "\n";
      if (mode == "crash") {
        std::cout.flush();
        return 3;
      }
    }
    std::cout.flush();
    answered = true;
  }
  for (auto it = buffered.rbegin(); it != buffered.rend(); ++it) {
    std::cout << *it << "\n";
  }
  std::cout.flush();
  if (mode == "exit-nonzero" && answered) return 1;
  return 0;
}
