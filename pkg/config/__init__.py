# Configuration module

