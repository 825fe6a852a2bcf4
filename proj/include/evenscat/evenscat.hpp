#pragma once

#include "errors.hpp"
#include "family.hpp"
#include "fieldcore.hpp"
#include "gf2.hpp"
#include "linpoly.hpp"
#include "linset.hpp"
#include "mrd.hpp"
#include "parallel.hpp"
#include "scatter.hpp"
