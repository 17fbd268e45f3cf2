# Configuration defaults and loader
