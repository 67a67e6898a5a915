#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace microdisk
{

/// Evaluates fn(0..n-1) on up to `threads` workers. Results keep index order;
/// the exception of the lowest failing index is rethrown.
template <class Fn> auto parallel_map(std::size_t n, int threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using T = decltype(fn(std::size_t{}));
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                slots[i].emplace(fn(i));
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    const int count = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (count == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (int t = 0; t < count; ++t)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(n);
    for (auto &s : slots)
        out.push_back(std::move(*s));
    return out;
}

} // namespace microdisk
