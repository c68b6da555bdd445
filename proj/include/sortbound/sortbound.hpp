#pragma once

#include "sortbound/canonical.hpp"
#include "sortbound/checkpoint.hpp"
#include "sortbound/error.hpp"
#include "sortbound/fja.hpp"
#include "sortbound/linext.hpp"
#include "sortbound/poset.hpp"
#include "sortbound/search.hpp"
#include "sortbound/store.hpp"
