#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace testsupport {

// Hand-built planner replies with hand-derived expected step lists. The
// expected values were written from the documented line grammar, so the
// corpus is an oracle for the parser, not a snapshot of its output.
struct PlanStepExpect {
  std::string main_point;
  int64_t target_words;
  bool out_of_range;
};

enum class PlanErr { none, no_steps, too_many_steps };

struct PlanCase {
  std::string name;
  std::string text;
  int max_steps;
  std::vector<PlanStepExpect> steps;  // ignored when err != none
  PlanErr err;
};

// Uniform "Paragraph k - Main Point: Step k - Word Count: 300 words" lines.
inline std::string uniform_plan(int n) {
  std::string out;
  for (int i = 1; i <= n; ++i) {
    out += "Paragraph " + std::to_string(i) + " - Main Point: Step " +
           std::to_string(i) + " - Word Count: 300 words\n";
  }
  return out;
}

inline std::vector<PlanCase> make_plan_corpus() {
  std::vector<PlanCase> cases = {
      {"single clean line",
       "Paragraph 1 - Main Point: Opening scene at the harbor - Word Count: 400 words",
       50,
       {{"Opening scene at the harbor", 400, false}},
       PlanErr::none},

      {"three clean lines",
       "Paragraph 1 - Main Point: Introduce the dispute - Word Count: 300 words\n"
       "Paragraph 2 - Main Point: Lay out the evidence - Word Count: 500 words\n"
       "Paragraph 3 - Main Point: Resolve and close - Word Count: 200 words",
       50,
       {{"Introduce the dispute", 300, false},
        {"Lay out the evidence", 500, false},
        {"Resolve and close", 200, false}},
       PlanErr::none},

      {"bracketed count",
       "Paragraph 1 - Main Point: Set the stakes - Word Count: [450 words]",
       50,
       {{"Set the stakes", 450, false}},
       PlanErr::none},

      {"bracketed main point",
       "Paragraph 1 - Main Point: [Describe the setting, in detail] - Word Count: 350 words",
       50,
       {{"Describe the setting, in detail", 350, false}},
       PlanErr::none},

      {"no unit suffix",
       "Paragraph 1 - Main Point: Sketch the timeline - Word Count: 600",
       50,
       {{"Sketch the timeline", 600, false}},
       PlanErr::none},

      {"chinese character unit",
       "Paragraph 1 - Main Point: 介绍研究背景 - Word Count: 500字",
       50,
       {{"介绍研究背景", 500, false}},
       PlanErr::none},

      {"chinese count label",
       "Paragraph 1 - Main Point: 总结全文观点 - 字数: 300",
       50,
       {{"总结全文观点", 300, false}},
       PlanErr::none},

      {"full-width digits and separators",
       "Paragraph １ － Main Point： 开场白 － Word Count： ３００字",
       50,
       {{"开场白", 300, false}},
       PlanErr::none},

      {"comma-grouped count",
       "Paragraph 1 - Main Point: The long middle - Word Count: 1,000 words",
       50,
       {{"The long middle", 1000, false}},
       PlanErr::none},

      {"approximately prefix",
       "Paragraph 1 - Main Point: Survey prior work - Word Count: approximately 450 words",
       50,
       {{"Survey prior work", 450, false}},
       PlanErr::none},

      {"markdown bullet and emphasis",
       "- **Paragraph 1 - Main Point: The hook - Word Count: 250 words**",
       50,
       {{"The hook", 250, false}},
       PlanErr::none},

      {"numbered list wrapper",
       "1. Paragraph 1 - Main Point: First beat - Word Count: 300 words\n"
       "2. Paragraph 2 - Main Point: Second beat - Word Count: 300 words",
       50,
       {{"First beat", 300, false}, {"Second beat", 300, false}},
       PlanErr::none},

      {"emphasis-wrapped main point",
       "Paragraph 1 - Main Point: **The hook** - Word Count: 300 words",
       50,
       {{"The hook", 300, false}},
       PlanErr::none},

      {"preamble and epilogue prose",
       "Sure! Here is a plan that covers everything you asked for.\n"
       "\n"
       "Paragraph 1 - Main Point: Frame the question - Word Count: 400 words\n"
       "Paragraph 2 - Main Point: Answer it - Word Count: 600 words\n"
       "\n"
       "Let me know if you would like me to adjust the structure.",
       50,
       {{"Frame the question", 400, false}, {"Answer it", 600, false}},
       PlanErr::none},

      {"blank lines between steps",
       "Paragraph 1 - Main Point: One - Word Count: 200 words\n"
       "\n"
       "\n"
       "Paragraph 2 - Main Point: Two - Word Count: 200 words",
       50,
       {{"One", 200, false}, {"Two", 200, false}},
       PlanErr::none},

      {"non-contiguous numbering is reindexed",
       "Paragraph 3 - Main Point: Actually first - Word Count: 300 words\n"
       "Paragraph 7 - Main Point: Actually second - Word Count: 300 words",
       50,
       {{"Actually first", 300, false}, {"Actually second", 300, false}},
       PlanErr::none},

      {"duplicate numbering keeps appearance order",
       "Paragraph 1 - Main Point: First of two ones - Word Count: 300 words\n"
       "Paragraph 1 - Main Point: Second of two ones - Word Count: 300 words",
       50,
       {{"First of two ones", 300, false}, {"Second of two ones", 300, false}},
       PlanErr::none},

      {"uppercase keywords",
       "PARAGRAPH 1 - MAIN POINT: Shouted plan - WORD COUNT: 400 WORDS",
       50,
       {{"Shouted plan", 400, false}},
       PlanErr::none},

      {"colon after step number",
       "Paragraph 1: Main Point: The setup - Word Count: 320 words",
       50,
       {{"The setup", 320, false}},
       PlanErr::none},

      {"main point mentioning word count",
       "Paragraph 1 - Main Point: Discuss word count norms in journalism - Word Count: 300 words",
       50,
       {{"Discuss word count norms in journalism", 300, false}},
       PlanErr::none},

      {"crlf line endings",
       "Paragraph 1 - Main Point: Windows plan - Word Count: 300 words\r\n"
       "Paragraph 2 - Main Point: Second line - Word Count: 400 words\r\n",
       50,
       {{"Windows plan", 300, false}, {"Second line", 400, false}},
       PlanErr::none},

      {"below range flagged",
       "Paragraph 1 - Main Point: Tiny fragment - Word Count: 100 words",
       50,
       {{"Tiny fragment", 100, true}},
       PlanErr::none},

      {"above range flagged",
       "Paragraph 1 - Main Point: Monster block - Word Count: 1500 words",
       50,
       {{"Monster block", 1500, true}},
       PlanErr::none},

      {"range boundaries are in range",
       "Paragraph 1 - Main Point: Lower edge - Word Count: 200 words\n"
       "Paragraph 2 - Main Point: Upper edge - Word Count: 1000 words",
       50,
       {{"Lower edge", 200, false}, {"Upper edge", 1000, false}},
       PlanErr::none},

      {"trailing period after count",
       "Paragraph 1 - Main Point: Calm ending - Word Count: 800 words.",
       50,
       {{"Calm ending", 800, false}},
       PlanErr::none},

      {"malformed lines are skipped around a valid one",
       "Paragraph - Main Point: No number here - Word Count: 300 words\n"
       "Paragraph 2 - Main Point: Missing count label entirely\n"
       "Paragraph 3 - Main Point: - Word Count: 300 words\n"
       "Paragraph 4 - Main Point: The survivor - Word Count: 300 words",
       50,
       {{"The survivor", 300, false}},
       PlanErr::none},

      {"prose before keyword disqualifies the line",
       "See Paragraph 1 - Main Point: Not a real step - Word Count: 300 words\n"
       "Paragraph 1 - Main Point: The real step - Word Count: 300 words",
       50,
       {{"The real step", 300, false}},
       PlanErr::none},

      {"zero count rejected",
       "Paragraph 1 - Main Point: Nothing asked - Word Count: 0 words\n"
       "Paragraph 2 - Main Point: Something asked - Word Count: 250 words",
       50,
       {{"Something asked", 250, false}},
       PlanErr::none},

      {"pure prose",
       "I would structure the essay around three movements, opening with the "
       "harbor, then the storm, then the reckoning afterwards.",
       50,
       {},
       PlanErr::no_steps},

      {"empty reply",
       "",
       50,
       {},
       PlanErr::no_steps},

      {"only malformed lines",
       "Paragraph one - Main Point: Spelled-out number - Word Count: 300 words\n"
       "Paragraph 2 - Main Topic: Wrong label - Word Count: 300 words",
       50,
       {},
       PlanErr::no_steps},

  };

  PlanCase sixty{"sixty steps over a fifty cap", uniform_plan(60), 50, {},
                 PlanErr::too_many_steps};
  cases.push_back(std::move(sixty));

  PlanCase twenty{"twenty steps under the cap", uniform_plan(20), 50, {},
                  PlanErr::none};
  for (int i = 1; i <= 20; ++i) {
    twenty.steps.push_back({"Step " + std::to_string(i), 300, false});
  }
  cases.push_back(std::move(twenty));
  return cases;
}

inline const std::vector<PlanCase>& plan_corpus() {
  static const std::vector<PlanCase> cases = make_plan_corpus();
  return cases;
}

}  // namespace testsupport
