﻿# package marker
