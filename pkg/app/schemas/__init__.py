﻿# schemas package
