// Acceptance runner: one PASS/FAIL line per criterion, check details indented
// below it. Exit status is 0 only when every selected criterion passes.
//
//   vnmeter_acceptance                 all criteria
//   vnmeter_acceptance --criterion 4   a single criterion

#include <cstdio>
#include <vector>

#include "CLI11.hpp"
#include "checks.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vnmeter acceptance criteria"};
    int criterion = 0;
    app.add_option("--criterion", criterion, "run only this criterion (1-10)")
        ->check(CLI::Range(1, vnmeter::checks::kCriterionCount));
    CLI11_PARSE(app, argc, argv);
    std::setvbuf(stdout, nullptr, _IOLBF, 0);

    std::vector<vnmeter::checks::CriterionResult> results;
    if (criterion != 0) {
        results.push_back(vnmeter::checks::run_criterion(criterion));
    } else {
        results = vnmeter::checks::run_suite("all");
    }
    bool ok = true;
    for (const auto& r : results) {
        std::printf("%s\n%s", vnmeter::checks::format_line(r).c_str(),
                    vnmeter::checks::format_details(r).c_str());
        ok = ok && r.pass();
    }
    return ok ? 0 : 1;
}
