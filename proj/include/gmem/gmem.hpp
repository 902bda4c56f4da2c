#pragma once

#include "gmem/corpus.hpp"
#include "gmem/evalbench.hpp"
#include "gmem/net.hpp"
#include "gmem/pattern.hpp"
#include "gmem/persistence.hpp"
