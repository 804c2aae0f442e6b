# Seeded synthesis of XWeB dimension data, categories and facts
