// Small tour of the library: counts, one exact geometric draw, the limit pmf
// of the largest-part offset and the CLT constants.
#include <iostream>

#include <partition_lab/partition_lab.hpp>

namespace pl = partition_lab;

int main()
{
    pl::CountCache cache;
    std::cout << "|P_100(100)| = " << cache.count_at_most(100, 100) << "\n";
    std::cout << "|P_10(3)| with k1 = 4: " << cache.count_with_largest(10, 3, 4) << "\n";

    pl::Rng rng = pl::make_stream(42, 0);
    pl::GeometricSampler sampler(cache, {301, 3, 0.5});
    std::cout << "geometric draw from P_301(3), q = 0.5: " << sampler.sample_partition(rng) << "\n";

    auto const pmf = pl::limit_pmf_k1(cache, {3, 1, 0.5, 1e-12});
    std::cout << "limit P(k1 - ceil(n/m) = l), m = 3, j = 1, q = 0.5:";
    for (std::int64_t l = 0; l < 5; ++l)
        std::cout << " " << pmf.at(l);
    std::cout << " ... (tail bound " << pmf.tail_bound << ")\n";

    auto const clt = pl::clt_params(0.5);
    std::cout << "q = 0.5: gamma = " << clt.gamma << ", sigma^2 = " << clt.sigma2 << "\n";
}
