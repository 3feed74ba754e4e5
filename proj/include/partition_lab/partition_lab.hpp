#pragma once

#include "analysis.hpp"
#include "big_int.hpp"
#include "cache_io.hpp"
#include "counting.hpp"
#include "discrete_pmf.hpp"
#include "errors.hpp"
#include "limits.hpp"
#include "partition.hpp"
#include "random.hpp"
#include "samplers.hpp"
#include "statistics.hpp"
#include "verify.hpp"
#include "version.hpp"
