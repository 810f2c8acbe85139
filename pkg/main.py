from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from config.config import NetcertConfig

config = NetcertConfig.get_instance()

# Initialize FastAPI app
app = FastAPI(
    title="NetCert",
    description="API for network nonlocality witnesses, bounds and certification",
    version=config.VERSION
)

# Configure CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Import and include routers
from api.witness_api import router as witness_router
from api.batch_api import router as batch_router

app.include_router(witness_router)
app.include_router(batch_router)


@app.get("/")
async def root():
    """Health check endpoint"""
    return {
        "status": "online",
        "service": config.SERVICE_NAME,
        "version": config.VERSION
    }

if __name__ == "__main__":
    import uvicorn
    uvicorn.run("main:app", host="0.0.0.0", port=8000, reload=True)
