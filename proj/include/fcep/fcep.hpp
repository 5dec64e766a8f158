#pragma once

#include "fcep/core.hpp"
#include "fcep/fls.hpp"
#include "fcep/fuzzy.hpp"
#include "fcep/ginv.hpp"
