#include "pflat/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace pflat {

int thread_count()
{
    const char* env = std::getenv("PFLAT_THREADS");
    if (env == nullptr) return 1;
    try {
        const int n = std::stoi(env);
        return std::clamp(n, 1, 256);
    } catch (const std::exception&) {
        return 1;
    }
}

void parallel_for(int n, const std::function<void(int)>& fn)
{
    const int workers = std::min(thread_count(), std::max(n, 1));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }

    struct Failure
    {
        int index = std::numeric_limits<int>::max();
        std::exception_ptr error;
    };
    std::vector<Failure> failures(static_cast<std::size_t>(workers));
    std::vector<std::thread> threads;
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            const int begin = w * chunk;
            const int end = std::min(n, begin + chunk);
            for (int i = begin; i < end; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    failures[static_cast<std::size_t>(w)] = {i, std::current_exception()};
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    const auto first = std::min_element(failures.begin(), failures.end(),
                                        [](const Failure& a, const Failure& b) { return a.index < b.index; });
    if (first->error) std::rethrow_exception(first->error);
}

} // namespace pflat
